//! Forward-only math of the pre-training objectives: masked patch
//! reconstruction, masked token cross-entropy, series-symbol contrastive
//! loss, momentum distillation, their weighted total, and the EMA update
//! of momentum parameters.

mod selftest;

pub use selftest::{run_selftest, SelftestCheck, SelftestReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimilarityConfig {
    pub tau: f64,
    pub alpha: f64,
    pub m_ema: f64,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        Self {
            tau: 0.07,
            alpha: 0.6,
            m_ema: 0.995,
        }
    }
}

impl SimilarityConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            errs.push(format!("tau must be positive, got {}", self.tau));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            errs.push(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.m_ema) {
            errs.push(format!("m_ema must lie in [0, 1], got {}", self.m_ema));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// `B × d` embeddings, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBatch {
    rows: Vec<Vec<f64>>,
    normalized: bool,
}

impl EmbeddingBatch {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || d == 0 {
            return Err(Error::arg("embedding batch must be non-empty"));
        }
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::arg("embedding rows have different widths"));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::arg("embedding contains non-finite values"));
        }
        let normalized = rows.iter().all(|r| (norm(r) - 1.0).abs() <= 1e-9);
        Ok(Self { rows, normalized })
    }

    /// Projects every row onto the unit sphere.
    pub fn normalized(rows: Vec<Vec<f64>>) -> Result<Self> {
        let mut batch = Self::new(rows)?;
        for r in &mut batch.rows {
            let n = norm(r);
            if n == 0.0 {
                return Err(Error::NumericDomain("cannot normalize a zero embedding".into()));
            }
            r.iter_mut().for_each(|v| *v /= n);
        }
        batch.normalized = true;
        Ok(batch)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_mask(mask: &[usize], len: usize) -> Result<()> {
    if mask.is_empty() {
        return Err(Error::arg("mask must select at least one position"));
    }
    let mut seen = vec![false; len];
    for &j in mask {
        if j >= len {
            return Err(Error::arg(format!("mask index {j} out of range for {len} positions")));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::arg(format!("mask index {j} appears twice")));
        }
    }
    Ok(())
}

/// Masked patch reconstruction error: `Σ_{j∈mask} ‖p_j − p̂_j‖²` divided by
/// `|mask| · patch_len`.
pub fn mtm_loss(targets: &[Vec<f64>], reconstructions: &[Vec<f64>], mask: &[usize]) -> Result<f64> {
    if targets.len() != reconstructions.len() {
        return Err(Error::arg("targets and reconstructions differ in patch count"));
    }
    check_mask(mask, targets.len())?;
    let patch_len = targets[mask[0]].len();
    let mut sum = 0.0;
    for &j in mask {
        let (p, q) = (&targets[j], &reconstructions[j]);
        if p.len() != patch_len || q.len() != patch_len {
            return Err(Error::arg(format!("patch {j} has a mismatched length")));
        }
        sum += p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    }
    Ok(sum / (mask.len() * patch_len) as f64)
}

fn check_distribution(row: &[f64], what: &str) -> Result<()> {
    if row.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::arg(format!("{what} has entries outside [0, 1]")));
    }
    let s: f64 = row.iter().sum();
    if (s - 1.0).abs() > 1e-6 {
        return Err(Error::arg(format!("{what} sums to {s}, expected 1")));
    }
    Ok(())
}

fn one_hot_index(row: &[f64]) -> Result<usize> {
    let mut hot = None;
    for (i, &v) in row.iter().enumerate() {
        if v == 1.0 && hot.is_none() {
            hot = Some(i);
        } else if v != 0.0 {
            return Err(Error::arg("target row is not one-hot"));
        }
    }
    hot.ok_or_else(|| Error::arg("target row is not one-hot"))
}

/// Mean over masked positions of `−ln p(true token)`.
pub fn mlm_loss(true_onehots: &[Vec<f64>], predicted_probs: &[Vec<f64>], mask: &[usize]) -> Result<f64> {
    if true_onehots.len() != predicted_probs.len() {
        return Err(Error::arg("targets and predictions differ in length"));
    }
    check_mask(mask, true_onehots.len())?;
    let mut sum = 0.0;
    for &j in mask {
        let (y, p) = (&true_onehots[j], &predicted_probs[j]);
        if y.len() != p.len() {
            return Err(Error::arg(format!("position {j}: vocabulary sizes differ")));
        }
        check_distribution(p, &format!("prediction {j}"))?;
        let t = one_hot_index(y)?;
        if p[t] <= 0.0 {
            return Err(Error::NumericDomain(format!("position {j}: zero probability on the true token")));
        }
        sum -= p[t].ln();
    }
    Ok(sum / mask.len() as f64)
}

/// Row `i` is `softmax_m(anchor_i · dictionary_m / τ)`.
pub fn softmax_similarity(anchor: &EmbeddingBatch, dictionary: &EmbeddingBatch, tau: f64) -> Result<Vec<Vec<f64>>> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::arg(format!("temperature must be positive, got {tau}")));
    }
    if !anchor.is_normalized() || !dictionary.is_normalized() {
        return Err(Error::arg("similarity inputs must be row-normalized"));
    }
    if anchor.dim() != dictionary.dim() {
        return Err(Error::arg(format!(
            "embedding widths differ: {} vs {}",
            anchor.dim(),
            dictionary.dim()
        )));
    }
    Ok(anchor
        .rows()
        .iter()
        .map(|a| {
            let logits: Vec<f64> = dictionary
                .rows()
                .iter()
                .map(|s| a.iter().zip(s).map(|(x, y)| x * y).sum::<f64>() / tau)
                .collect();
            softmax(&logits)
        })
        .collect())
}

/// Numerically stable softmax (max-subtracted).
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn check_matrix(p: &[Vec<f64>], what: &str) -> Result<usize> {
    let width = p.first().map(Vec::len).unwrap_or(0);
    if p.is_empty() || width == 0 {
        return Err(Error::arg(format!("{what} is empty")));
    }
    for (i, row) in p.iter().enumerate() {
        if row.len() != width {
            return Err(Error::arg(format!("{what} row {i} has a different width")));
        }
        check_distribution(row, &format!("{what} row {i}"))?;
    }
    Ok(width)
}

/// `½ · mean_i [−ln p^{t2s}_i(pos_i) − ln p^{s2t}_i(pos_i)]`.
pub fn contrastive_loss(p_t2s: &[Vec<f64>], p_s2t: &[Vec<f64>], positives: &[usize]) -> Result<f64> {
    let w1 = check_matrix(p_t2s, "p_t2s")?;
    let w2 = check_matrix(p_s2t, "p_s2t")?;
    if p_t2s.len() != positives.len() || p_s2t.len() != positives.len() {
        return Err(Error::arg("need exactly one positive index per row"));
    }
    let mut sum = 0.0;
    for (i, &pos) in positives.iter().enumerate() {
        if pos >= w1 || pos >= w2 {
            return Err(Error::arg(format!("positive index {pos} out of range in row {i}")));
        }
        for p in [p_t2s[i][pos], p_s2t[i][pos]] {
            if p <= 0.0 {
                return Err(Error::NumericDomain(format!("row {i}: zero probability on the positive")));
            }
            sum -= p.ln();
        }
    }
    Ok(0.5 * sum / positives.len() as f64)
}

/// `KL(q ‖ p)` with `0·ln(0/x) = 0`.
pub fn kl_divergence(q: &[f64], p: &[f64]) -> Result<f64> {
    if q.len() != p.len() {
        return Err(Error::arg("KL arguments differ in length"));
    }
    let mut kl = 0.0;
    for (i, (&qi, &pi)) in q.iter().zip(p).enumerate() {
        if qi > 0.0 {
            if pi <= 0.0 {
                return Err(Error::NumericDomain(format!("p has no mass at index {i} where q > 0")));
            }
            kl += qi * (qi / pi).ln();
        }
    }
    // Gibbs' inequality; clamp rounding noise below zero.
    Ok(kl.max(0.0))
}

/// `½ · mean_i [KL(q^{t2s}_i ‖ p^{t2s}_i) + KL(q^{s2t}_i ‖ p^{s2t}_i)]`.
pub fn momentum_distill_loss(
    q_t2s: &[Vec<f64>],
    q_s2t: &[Vec<f64>],
    p_t2s: &[Vec<f64>],
    p_s2t: &[Vec<f64>],
) -> Result<f64> {
    for (m, name) in [(q_t2s, "q_t2s"), (q_s2t, "q_s2t"), (p_t2s, "p_t2s"), (p_s2t, "p_s2t")] {
        check_matrix(m, name)?;
    }
    let rows = q_t2s.len();
    if q_s2t.len() != rows || p_t2s.len() != rows || p_s2t.len() != rows {
        return Err(Error::arg("distillation matrices differ in row count"));
    }
    let mut sum = 0.0;
    for i in 0..rows {
        sum += kl_divergence(&q_t2s[i], &p_t2s[i])?;
        sum += kl_divergence(&q_s2t[i], &p_s2t[i])?;
    }
    Ok(0.5 * sum / rows as f64)
}

/// `L_mtm + L_mlm + α·L_tsc + (1 − α)·L_mod`.
pub fn total_loss(mtm: f64, mlm: f64, tsc: f64, distill: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::arg(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(mtm + mlm + alpha * tsc + (1.0 - alpha) * distill)
}

/// `θ' ← m·θ' + (1 − m)·θ`, elementwise.
pub fn ema_update(online: &[f64], momentum: &[f64], m_ema: f64) -> Result<Vec<f64>> {
    if online.len() != momentum.len() {
        return Err(Error::arg(format!(
            "parameter vectors differ in length: {} vs {}",
            online.len(),
            momentum.len()
        )));
    }
    if !(0.0..=1.0).contains(&m_ema) {
        return Err(Error::arg(format!("m_ema must lie in [0, 1], got {m_ema}")));
    }
    Ok(momentum
        .iter()
        .zip(online)
        .map(|(t_m, t)| m_ema * t_m + (1.0 - m_ema) * t)
        .collect())
}
