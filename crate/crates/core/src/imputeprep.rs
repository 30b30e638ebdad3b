//! Point-level masking and neighbour pre-interpolation for imputation.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MaskedSeries {
    pub values: Vec<Option<f64>>,
    pub miss_mask: Vec<bool>,
    /// Ground truth; NaN at positions that were never observed.
    pub original: Vec<f64>,
}

impl MaskedSeries {
    /// Wraps a series read with gaps already present.
    pub fn from_observed(values: Vec<Option<f64>>) -> Self {
        let miss_mask = values.iter().map(Option::is_none).collect();
        let original = values.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
        Self {
            values,
            miss_mask,
            original,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn missing_count(&self) -> usize {
        self.miss_mask.iter().filter(|&&m| m).count()
    }

    /// Additionally hides `⌊ratio·L⌋` positions chosen uniformly among all
    /// positions (already-missing ones stay missing).
    pub fn mask_more<R: Rng + ?Sized>(mut self, ratio: f64, rng: &mut R) -> Result<Self> {
        check_ratio(ratio)?;
        let k = (ratio * self.len() as f64).floor() as usize;
        for i in index::sample(rng, self.len(), k) {
            self.values[i] = None;
            self.miss_mask[i] = true;
        }
        Ok(self)
    }
}

fn check_ratio(ratio: f64) -> Result<()> {
    if ratio > 0.0 && ratio < 1.0 {
        Ok(())
    } else {
        Err(Error::arg(format!("mask ratio must lie in (0, 1), got {ratio}")))
    }
}

/// Hides exactly `⌊ratio·L⌋` uniformly chosen points.
pub fn point_mask<R: Rng + ?Sized>(series: &[f64], ratio: f64, rng: &mut R) -> Result<MaskedSeries> {
    check_ratio(ratio)?;
    let k = (ratio * series.len() as f64).floor() as usize;
    let mut miss_mask = vec![false; series.len()];
    for i in index::sample(rng, series.len(), k) {
        miss_mask[i] = true;
    }
    let values = series
        .iter()
        .zip(&miss_mask)
        .map(|(&v, &m)| if m { None } else { Some(v) })
        .collect();
    Ok(MaskedSeries {
        values,
        miss_mask,
        original: series.to_vec(),
    })
}

/// Fills gaps from their neighbours, pass by pass: a missing point with both
/// neighbours known takes their mean, with one neighbour known copies it.
/// Each pass reads the state left by the previous one, so longer gaps close
/// from both ends inward.
pub fn pre_interpolate(ms: &MaskedSeries) -> Result<Vec<f64>> {
    let n = ms.len();
    if ms.values.iter().all(Option::is_none) {
        return Err(Error::arg("cannot interpolate a series with no observed points"));
    }
    let mut cur = ms.values.clone();
    let mut missing = cur.iter().filter(|v| v.is_none()).count();
    while missing > 0 {
        let prev = cur.clone();
        for t in 0..n {
            if prev[t].is_some() {
                continue;
            }
            let left = if t > 0 { prev[t - 1] } else { None };
            let right = prev.get(t + 1).copied().flatten();
            cur[t] = match (left, right) {
                (Some(a), Some(b)) => Some((a + b) / 2.0),
                (None, Some(b)) => Some(b),
                (Some(a), None) => Some(a),
                (None, None) => None,
            };
        }
        let still = cur.iter().filter(|v| v.is_none()).count();
        if still == missing {
            return Err(Error::Internal("pre-interpolation stalled".into()));
        }
        missing = still;
    }
    Ok(cur.into_iter().map(|v| v.expect("all gaps filled")).collect())
}
