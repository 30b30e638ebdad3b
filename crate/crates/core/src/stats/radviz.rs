//! Radviz projection of six-metric profiles onto the unit disk.

use serde::{Deserialize, Serialize};

use super::StatsProfile;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadvizPoint {
    pub x: f64,
    pub y: f64,
}

pub const RADVIZ_DIMS: usize = 6;

/// Anchor `j` sits at angle `2πj / 6`.
pub fn anchors() -> [(f64, f64); RADVIZ_DIMS] {
    std::array::from_fn(|j| {
        let a = 2.0 * std::f64::consts::PI * j as f64 / RADVIZ_DIMS as f64;
        (a.cos(), a.sin())
    })
}

/// Anchor order: adf_stat, forecastability, fft_mean, perm_entropy,
/// seasonality, mk_trend (mapped to `(v + 1) / 2`).
pub fn radviz_features(p: &StatsProfile) -> [f64; RADVIZ_DIMS] {
    [
        p.adf_stat,
        p.forecastability,
        p.fft_mean,
        p.perm_entropy,
        p.seasonality,
        (p.mk_trend as f64 + 1.0) / 2.0,
    ]
}

pub fn radviz_project(profiles: &[StatsProfile]) -> Result<Vec<RadvizPoint>> {
    let rows: Vec<[f64; RADVIZ_DIMS]> = profiles.iter().map(radviz_features).collect();
    radviz_project_rows(&rows)
}

/// Min-max normalizes each column over the set, then places every row at
/// the weighted barycenter of the anchors. Constant columns normalize to 0;
/// an all-zero row maps to the origin.
pub fn radviz_project_rows(rows: &[[f64; RADVIZ_DIMS]]) -> Result<Vec<RadvizPoint>> {
    if rows.len() < 2 {
        return Err(Error::arg(format!("radviz needs at least 2 profiles, got {}", rows.len())));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::arg("radviz input contains non-finite values"));
    }
    let mut lo = [f64::INFINITY; RADVIZ_DIMS];
    let mut hi = [f64::NEG_INFINITY; RADVIZ_DIMS];
    for row in rows {
        for j in 0..RADVIZ_DIMS {
            lo[j] = lo[j].min(row[j]);
            hi[j] = hi[j].max(row[j]);
        }
    }
    let anchors = anchors();
    Ok(rows
        .iter()
        .map(|row| {
            let mut weights = [0.0; RADVIZ_DIMS];
            for j in 0..RADVIZ_DIMS {
                let span = hi[j] - lo[j];
                weights[j] = if span > 0.0 { (row[j] - lo[j]) / span } else { 0.0 };
            }
            project_weights(&weights, &anchors)
        })
        .collect())
}

fn project_weights(w: &[f64; RADVIZ_DIMS], anchors: &[(f64, f64); RADVIZ_DIMS]) -> RadvizPoint {
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return RadvizPoint { x: 0.0, y: 0.0 };
    }
    let (mut x, mut y) = (0.0, 0.0);
    for (wj, (ax, ay)) in w.iter().zip(anchors) {
        x += wj * ax;
        y += wj * ay;
    }
    RadvizPoint {
        x: x / total,
        y: y / total,
    }
}
