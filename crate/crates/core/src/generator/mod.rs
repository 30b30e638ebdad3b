//! Series-symbol pair generation.
//!
//! A pair couples a standardized input `X` (`M × L`) with `Y = f(X)`
//! (`N × L`) and the text of the `N` expressions in `f`. Expressions that
//! leave their domain on `X` or exceed the value cap are discarded and
//! redrawn.

mod dataset;
mod patch;

pub use dataset::{cell_counts, generate_dataset, shard_file_name, CellSummary, Manifest, MANIFEST_FILE};
pub use patch::{apply_mtm_mask, patchify, PatchSet, DEFAULT_MAX_PATCHES, DEFAULT_PATCH_LEN};

use std::fmt;

use log::trace;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{evaluate_raw, parse, sample_expr, Expr, ExprSamplerParams, ExprSet};
use crate::rng::Stream;
use crate::sampler::{generate_series, sample_input_spec, standardize, SourceKind, SourceParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub series_len: usize,
    pub m_max: usize,
    pub n_max: usize,
    pub sources: SourceParams,
    pub value_cap: f64,
    pub max_retries: usize,
    pub expr: ExprSamplerParams,
    pub seed: u64,
    pub pairs_per_cell: Option<usize>,
    pub total_pairs: Option<usize>,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            series_len: 256,
            m_max: 6,
            n_max: 12,
            sources: SourceParams::default(),
            value_cap: 1e4,
            max_retries: 100,
            expr: ExprSamplerParams::default(),
            seed: 0,
            pairs_per_cell: None,
            total_pairs: None,
        }
    }
}

impl GenConfig {
    pub const DEFAULT_PAIRS_PER_CELL: usize = 100;

    /// Every constraint violation, not just the first.
    pub fn violations(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if self.series_len < 32 {
            errs.push(format!("series_len must be at least 32, got {}", self.series_len));
        }
        if self.series_len > u16::MAX as usize {
            errs.push(format!("series_len must fit in 16 bits, got {}", self.series_len));
        }
        for (name, v) in [("m_max", self.m_max), ("n_max", self.n_max)] {
            if v == 0 || v > u8::MAX as usize {
                errs.push(format!("{name} must lie in 1..=255, got {v}"));
            }
        }
        if !(self.value_cap > 0.0) || !self.value_cap.is_finite() {
            errs.push(format!("value_cap must be positive and finite, got {}", self.value_cap));
        }
        if self.max_retries == 0 {
            errs.push("max_retries must be at least 1".to_string());
        }
        if !(0.0..=1.0).contains(&self.sources.threshold) {
            errs.push(format!("sources.threshold must lie in [0, 1], got {}", self.sources.threshold));
        }
        for (name, v) in [
            ("sources.k_max", self.sources.k_max),
            ("sources.p_max", self.sources.p_max),
            ("sources.q_max", self.sources.q_max),
            ("sources.arma_max_retries", self.sources.arma_max_retries),
        ] {
            if v == 0 {
                errs.push(format!("{name} must be at least 1"));
            }
        }
        if self.pairs_per_cell.is_some() && self.total_pairs.is_some() {
            errs.push("set at most one of pairs_per_cell and total_pairs".to_string());
        }
        if let Err(Error::Config(e)) = self.expr.validate() {
            errs.extend(e.into_iter().map(|m| format!("expr.{m}")));
        }
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let errs = self.violations();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// Where a generated pair came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPath {
    pub master_seed: u64,
    pub m: usize,
    pub n: usize,
    pub draw: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub source: SourceKind,
    pub seed_path: Option<SeedPath>,
    /// Candidates discarded before this pair was accepted.
    pub rejections: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPair {
    /// `M` channels, standardized and snapped to the f32 grid so that the
    /// stored shard reproduces `Y` exactly.
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
    pub expr_texts: Vec<String>,
    /// `None` for pairs read back from a shard.
    pub provenance: Option<Provenance>,
}

impl SeriesPair {
    pub fn m(&self) -> usize {
        self.x.len()
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn len(&self) -> usize {
        self.x.first().map(Vec::len).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Input channels followed by output channels.
    pub fn channels(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.x.iter().chain(self.y.iter())
    }

    pub fn concatenated(&self) -> Vec<Vec<f64>> {
        self.channels().cloned().collect()
    }

    /// Same record content, ignoring provenance.
    pub fn same_record(&self, other: &SeriesPair) -> bool {
        self.x == other.x && self.y == other.y && self.expr_texts == other.expr_texts
    }

    /// Checks every pair invariant: finiteness, the value cap, standardized
    /// inputs (within `std_tol`), and that the expression texts re-evaluated
    /// on `X` reproduce `Y` within `rel_tol`.
    pub fn check_invariants(&self, value_cap: f64, std_tol: f64, rel_tol: f64) -> Result<(), String> {
        let (m, n, len) = (self.m(), self.n(), self.len());
        if m == 0 || n == 0 || len == 0 {
            return Err("empty pair".into());
        }
        if self.channels().any(|c| c.len() != len) {
            return Err("ragged channels".into());
        }
        if self.channels().flatten().any(|v| !v.is_finite()) {
            return Err("non-finite value".into());
        }
        let peak = self.y.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        if peak > value_cap {
            return Err(format!("max |Y| = {peak} exceeds cap {value_cap}"));
        }
        for (i, ch) in self.x.iter().enumerate() {
            let (mean, std) = crate::sampler::mean_std(ch);
            if mean.abs() > std_tol || (std - 1.0).abs() > std_tol {
                return Err(format!("x{} not standardized: mean {mean}, std {std}", i + 1));
            }
        }
        if self.expr_texts.len() != n {
            return Err(format!("{} expression texts for {n} outputs", self.expr_texts.len()));
        }
        for (k, text) in self.expr_texts.iter().enumerate() {
            let (idx, e) = parse(text).map_err(|e| format!("y{}: {e}", k + 1))?;
            if idx != k + 1 {
                return Err(format!("expression {} is labelled y{idx}", k + 1));
            }
            let got = evaluate_raw(&e, &self.x).map_err(|e| format!("y{}: {e}", k + 1))?;
            for (t, (a, b)) in got.iter().zip(&self.y[k]).enumerate() {
                if !(a - b).abs().le(&(rel_tol * a.abs().max(b.abs()) + 1e-30)) {
                    return Err(format!("y{} differs at t={t}: text gives {a}, stored {b}", k + 1));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    DegenerateInput,
    OutsideDomain,
    ExceedsCap,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rejection::DegenerateInput => "an input channel was constant",
            Rejection::OutsideDomain => "an output left the expression domain",
            Rejection::ExceedsCap => "an output exceeded the value cap",
        })
    }
}

pub fn generate_pair(m: usize, n: usize, cfg: &GenConfig, rng: &mut Stream) -> Result<SeriesPair> {
    generate_pair_with(m, n, cfg, rng, |rng| Ok(sample_expr(m, &cfg.expr, rng)))
}

/// Like [`generate_pair`] with a caller-supplied sampler for single output
/// expressions over `m` variables.
///
/// Each attempt draws a fresh input `X`, then fills the outputs one at a
/// time: an expression that is invalid on `X` or exceeds the cap is
/// discarded and redrawn (up to `max_retries` times) before the whole
/// attempt is abandoned.
pub fn generate_pair_with<F>(m: usize, n: usize, cfg: &GenConfig, rng: &mut Stream, mut sample_one: F) -> Result<SeriesPair>
where
    F: FnMut(&mut Stream) -> Result<Expr>,
{
    if m == 0 || m > cfg.m_max || n == 0 || n > cfg.n_max {
        return Err(Error::arg(format!(
            "pair dimensions M={m}, N={n} outside 1..={} x 1..={}",
            cfg.m_max, cfg.n_max
        )));
    }
    cfg.expr.validate()?;
    let mut last = None;
    let mut rejections = 0;
    'attempt: for attempt in 0..cfg.max_retries {
        let spec = sample_input_spec(&cfg.sources, rng)?;
        let x = match prepare_inputs(generate_series(&spec, m, cfg.series_len, rng)?) {
            Ok(x) => x,
            Err(why) => {
                trace!("attempt {attempt} for ({m}, {n}): {why}");
                rejections += 1;
                last = Some(why);
                continue;
            }
        };
        let mut exprs = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let mut accepted = None;
            for _ in 0..cfg.max_retries {
                let e = sample_one(rng)?;
                if e.max_var() > m {
                    return Err(Error::arg("expression sampler used a variable beyond M"));
                }
                match evaluate_output(&e, &x, cfg.value_cap) {
                    Ok(out) => {
                        accepted = Some((e, out));
                        break;
                    }
                    Err(why) => {
                        rejections += 1;
                        last = Some(why);
                    }
                }
            }
            match accepted {
                Some((e, out)) => {
                    exprs.push(e);
                    y.push(out);
                }
                None => {
                    trace!("attempt {attempt} for ({m}, {n}): an output found no valid expression");
                    continue 'attempt;
                }
            }
        }
        let exprs = ExprSet::new(m, exprs)?;
        return Ok(SeriesPair {
            x,
            y,
            expr_texts: exprs.texts(),
            provenance: Some(Provenance {
                source: spec.kind(),
                seed_path: None,
                rejections,
            }),
        });
    }
    Err(Error::GenerationFailed {
        attempts: cfg.max_retries,
        last_reason: last.map(|r| r.to_string()).unwrap_or_default(),
    })
}

/// Standardizes and snaps to the f32 grid.
fn prepare_inputs(raw: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>, Rejection> {
    let std = standardize(&raw);
    if std.any_degenerate() {
        return Err(Rejection::DegenerateInput);
    }
    Ok(std
        .channels
        .into_iter()
        .map(|c| c.into_iter().map(|v| v as f32 as f64).collect())
        .collect())
}

fn evaluate_output(e: &Expr, x: &[Vec<f64>], cap: f64) -> Result<Vec<f64>, Rejection> {
    let out = evaluate_raw(e, x).map_err(|_| Rejection::OutsideDomain)?;
    if out.iter().any(|v| v.is_nan()) {
        return Err(Rejection::OutsideDomain);
    }
    if out.iter().any(|v| v.abs() > cap) {
        return Err(Rejection::ExceedsCap);
    }
    Ok(out)
}
