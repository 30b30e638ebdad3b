//! Six-metric characterization of a single series: stationarity (ADF),
//! forecastability, FFT mean, permutation entropy, STL seasonality
//! strength and Mann-Kendall trend, plus Radviz projection.

mod adf;
mod mann_kendall;
mod permutation;
mod radviz;
mod spectral;
mod stl;

pub use adf::{adf_test, adf_test_with_lags, mackinnon_p_value, schwert_lag, AdfResult};
pub use mann_kendall::{mann_kendall, mann_kendall_s, MannKendall};
pub use permutation::{ordinal_pattern_counts, permutation_entropy};
pub use radviz::{anchors, radviz_features, radviz_project, radviz_project_rows, RadvizPoint, RADVIZ_DIMS};
pub use spectral::{dominant_period, fft_mean, forecastability, periodogram};
pub use stl::{stl, Decomposition, StlParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seasonality {
    pub strength: f64,
    pub period: usize,
    /// `false` when no period was given and none could be read off the
    /// spectrum; `strength` is then 0.
    pub resolved: bool,
}

/// `max{0, 1 − Var(R) / Var(S + R)}` from a non-robust STL fit.
///
/// Without an explicit period, the dominant periodogram bin decides it,
/// clamped to `[2, L/3]` so that at least three cycles are available.
pub fn stl_seasonality(series: &[f64], period: Option<usize>) -> Result<Seasonality> {
    stl_seasonality_with(series, period, StlParams::DEFAULT_SEASONAL_SPAN)
}

pub fn stl_seasonality_with(series: &[f64], period: Option<usize>, seasonal_span: usize) -> Result<Seasonality> {
    let n = series.len();
    let period = match period {
        Some(p) => {
            if p < 2 || n < 3 * p {
                return Err(Error::arg(format!("period {p} needs 2 <= period and 3·period <= {n}")));
            }
            p
        }
        None => {
            if n < 6 {
                return Err(Error::arg(format!("seasonality needs at least 6 points, got {n}")));
            }
            match dominant_period(series) {
                Some(p) => p.clamp(2, n / 3),
                None => {
                    return Ok(Seasonality {
                        strength: 0.0,
                        period: 0,
                        resolved: false,
                    })
                }
            }
        }
    };
    let d = stl(series, &StlParams::with_seasonal_span(period, seasonal_span))?;
    let sr: Vec<f64> = d.seasonal.iter().zip(&d.remainder).map(|(s, r)| s + r).collect();
    let var_sr = variance(&sr);
    let strength = if var_sr > 0.0 {
        (1.0 - variance(&d.remainder) / var_sr).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(Seasonality {
        strength,
        period,
        resolved: true,
    })
}

fn variance(x: &[f64]) -> f64 {
    let (_, std) = crate::sampler::mean_std(x);
    std * std
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatsProfile {
    pub adf_stat: f64,
    pub adf_p: f64,
    pub forecastability: f64,
    pub fft_mean: f64,
    pub perm_entropy: f64,
    pub seasonality: f64,
    pub mk_trend: i8,
    #[serde(skip)]
    pub flags: ProfileFlags,
}

/// Metrics that fell back to their defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProfileFlags {
    pub adf: bool,
    pub forecastability: bool,
    pub fft_mean: bool,
    pub perm_entropy: bool,
    pub seasonality: bool,
    pub mk_trend: bool,
}

impl ProfileFlags {
    pub fn any(&self) -> bool {
        self.adf || self.forecastability || self.fft_mean || self.perm_entropy || self.seasonality || self.mk_trend
    }
}

/// Settings for [`profile_series_with`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsOptions {
    pub perm_order: usize,
    pub perm_delay: usize,
    pub mk_alpha: f64,
    pub stl_seasonal_span: usize,
    /// Fixed STL period; `None` picks the dominant periodogram period.
    pub period: Option<usize>,
}

impl Default for StatsOptions {
    fn default() -> Self {
        Self {
            perm_order: 3,
            perm_delay: 1,
            mk_alpha: 0.05,
            stl_seasonal_span: StlParams::DEFAULT_SEASONAL_SPAN,
            period: None,
        }
    }
}

impl StatsOptions {
    pub fn violations(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if !(2..=8).contains(&self.perm_order) {
            errs.push(format!("perm_order must lie in 2..=8, got {}", self.perm_order));
        }
        if self.perm_delay == 0 {
            errs.push("perm_delay must be at least 1".to_string());
        }
        if !(self.mk_alpha > 0.0 && self.mk_alpha < 1.0) {
            errs.push(format!("mk_alpha must lie in (0, 1), got {}", self.mk_alpha));
        }
        if self.stl_seasonal_span < 3 || self.stl_seasonal_span % 2 == 0 {
            errs.push(format!("stl_seasonal_span must be odd and at least 3, got {}", self.stl_seasonal_span));
        }
        if let Some(p) = self.period {
            if p < 2 {
                errs.push(format!("period must be at least 2, got {p}"));
            }
        }
        errs
    }
}

/// All six metrics with default settings. A metric that cannot be computed
/// falls back to its flagged default (ADF p = 1, everything else 0).
pub fn profile_series(series: &[f64]) -> Result<StatsProfile> {
    profile_series_with(series, &StatsOptions::default())
}

pub fn profile_series_with(series: &[f64], opts: &StatsOptions) -> Result<StatsProfile> {
    if series.is_empty() {
        return Err(Error::arg("cannot profile an empty series"));
    }
    let mut flags = ProfileFlags::default();
    let (adf_stat, adf_p) = match adf_test(series) {
        Ok(r) => (r.stat, r.p_value),
        Err(_) => {
            flags.adf = true;
            (0.0, 1.0)
        }
    };
    let forecast = forecastability(series).unwrap_or_else(|_| {
        flags.forecastability = true;
        0.0
    });
    let fft = fft_mean(series).unwrap_or_else(|_| {
        flags.fft_mean = true;
        0.0
    });
    let perm = permutation_entropy(series, opts.perm_order, opts.perm_delay).unwrap_or_else(|_| {
        flags.perm_entropy = true;
        0.0
    });
    let seasonality = match stl_seasonality_with(series, opts.period, opts.stl_seasonal_span) {
        Ok(s) if s.resolved => s.strength,
        _ => {
            flags.seasonality = true;
            0.0
        }
    };
    let mk = match mann_kendall(series, opts.mk_alpha) {
        Ok(r) => r.trend,
        Err(_) => {
            flags.mk_trend = true;
            0
        }
    };
    Ok(StatsProfile {
        adf_stat,
        adf_p,
        forecastability: forecast,
        fft_mean: fft,
        perm_entropy: perm,
        seasonality,
        mk_trend: mk,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_is_seasonal() {
        let x: Vec<f64> = (0..256).map(|t| (2.0 * PI * t as f64 / 16.0).sin()).collect();
        let s = stl_seasonality(&x, Some(16)).unwrap();
        assert!(s.strength >= 0.99, "{}", s.strength);
        let auto = stl_seasonality(&x, None).unwrap();
        assert_eq!(auto.period, 16);
        assert!(auto.strength >= 0.99);
    }

    #[test]
    fn flat_spectrum_is_flagged() {
        let s = stl_seasonality(&[4.0; 64], None).unwrap();
        assert!(!s.resolved);
        assert_eq!(s.strength, 0.0);
    }

    #[test]
    fn explicit_period_too_long() {
        assert!(stl_seasonality(&[0.0; 40], Some(16)).is_err());
    }

    #[test]
    fn constant_profile_uses_flagged_defaults() {
        let p = profile_series(&[1.5; 64]).unwrap();
        assert!(p.flags.adf && p.flags.forecastability && p.flags.seasonality);
        assert_eq!(p.adf_p, 1.0);
        assert_eq!(p.forecastability, 0.0);
        assert_eq!(p.seasonality, 0.0);
        assert_eq!(p.mk_trend, 0);
        assert!(profile_series(&[]).is_err());
    }
}
