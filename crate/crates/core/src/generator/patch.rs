use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

pub const DEFAULT_PATCH_LEN: usize = 16;
pub const DEFAULT_MAX_PATCHES: usize = 288;

/// Channels cut into fixed-length tokens, padded to a fixed count.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchSet {
    pub patch_len: usize,
    pub patches: Vec<Vec<f64>>,
    /// `true` for padding patches.
    pub pad_mask: Vec<bool>,
    /// `true` for patches hidden from the encoder.
    pub mtm_mask: Vec<bool>,
}

impl PatchSet {
    pub fn real_count(&self) -> usize {
        self.pad_mask.iter().filter(|&&p| !p).count()
    }

    pub fn masked_indices(&self) -> Vec<usize> {
        (0..self.patches.len()).filter(|&i| self.mtm_mask[i]).collect()
    }

    /// Patches as the encoder sees them: masked ones zeroed.
    pub fn masked_view(&self) -> Vec<Vec<f64>> {
        self.patches
            .iter()
            .zip(&self.mtm_mask)
            .map(|(p, &m)| if m { vec![0.0; p.len()] } else { p.clone() })
            .collect()
    }
}

/// Splits each channel into patches, channel by channel, and zero-pads to
/// `max_patches`. Every channel length must be a multiple of `patch_len`.
pub fn patchify(channels: &[Vec<f64>], patch_len: usize, max_patches: usize) -> Result<PatchSet> {
    if patch_len == 0 {
        return Err(Error::arg("patch_len must be positive"));
    }
    let mut patches = Vec::new();
    for (i, ch) in channels.iter().enumerate() {
        if ch.is_empty() || ch.len() % patch_len != 0 {
            return Err(Error::arg(format!(
                "channel {i} has length {}, not a positive multiple of {patch_len}",
                ch.len()
            )));
        }
        patches.extend(ch.chunks(patch_len).map(<[f64]>::to_vec));
    }
    if patches.len() > max_patches {
        return Err(Error::arg(format!(
            "{} patches exceed the maximum of {max_patches}",
            patches.len()
        )));
    }
    let real = patches.len();
    patches.resize(max_patches, vec![0.0; patch_len]);
    let pad_mask = (0..max_patches).map(|i| i >= real).collect();
    Ok(PatchSet {
        patch_len,
        patches,
        pad_mask,
        mtm_mask: vec![false; max_patches],
    })
}

/// Hides `⌊ratio·real⌋` uniformly chosen real patches; padding is never
/// chosen. Replaces any previous mask.
pub fn apply_mtm_mask<R: Rng + ?Sized>(set: &mut PatchSet, ratio: f64, rng: &mut R) -> Result<()> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::arg(format!("mask ratio must lie in [0, 1], got {ratio}")));
    }
    let real: Vec<usize> = (0..set.patches.len()).filter(|&i| !set.pad_mask[i]).collect();
    let k = (ratio * real.len() as f64).floor() as usize;
    set.mtm_mask.iter_mut().for_each(|m| *m = false);
    for j in index::sample(rng, real.len(), k) {
        set.mtm_mask[real[j]] = true;
    }
    Ok(())
}
