//! Augmented Dickey-Fuller unit-root test, constant-only regression.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdfResult {
    /// t-ratio on the lagged level.
    pub stat: f64,
    pub p_value: f64,
    pub lags: usize,
    pub nobs: usize,
}

/// Schwert rule `⌊12·(n/100)^{1/4}⌋`.
pub fn schwert_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

pub fn adf_test(series: &[f64]) -> Result<AdfResult> {
    if series.len() < 20 {
        return Err(Error::arg(format!("ADF needs at least 20 points, got {}", series.len())));
    }
    adf_test_with_lags(series, schwert_lag(series.len()))
}

/// `Δy_t = γ·y_{t-1} + Σ_{i=1..lags} δ_i·Δy_{t-i} + c + e_t`
pub fn adf_test_with_lags(series: &[f64], lags: usize) -> Result<AdfResult> {
    let n = series.len();
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("ADF input contains non-finite values"));
    }
    if series.iter().all(|&v| v == series[0]) {
        return Err(Error::DegenerateInput("ADF on a constant series".into()));
    }
    let ncols = lags + 2;
    if n < lags + 2 || n - 1 - lags <= ncols {
        return Err(Error::arg(format!("series of length {n} is too short for {lags} ADF lags")));
    }
    let diff: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let nobs = diff.len() - lags;

    let design = DMatrix::from_fn(nobs, ncols, |r, c| {
        let t = lags + r;
        match c {
            0 => series[t],
            c if c <= lags => diff[t - c],
            _ => 1.0,
        }
    });
    let target = DVector::from_fn(nobs, |r, _| diff[lags + r]);

    let qr = design.clone().qr();
    let r = qr.r();
    if (0..ncols).any(|i| r[(i, i)].abs() < 1e-12 * r[(0, 0)].abs().max(1e-300)) {
        return Err(Error::DegenerateInput("ADF design matrix is rank deficient".into()));
    }
    let qty = qr.q().transpose() * &target;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::DegenerateInput("ADF regression is singular".into()))?;
    let resid = &target - &design * &beta;
    let sigma2 = resid.norm_squared() / (nobs - ncols) as f64;

    // [(XᵀX)⁻¹]₀₀ = ‖row 0 of R⁻¹‖²
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(ncols, ncols))
        .ok_or_else(|| Error::DegenerateInput("ADF regression is singular".into()))?;
    let var_gamma = sigma2 * r_inv.row(0).norm_squared();
    if !(var_gamma > 0.0) {
        return Err(Error::DegenerateInput("ADF residual variance is zero".into()));
    }
    let stat = beta[0] / var_gamma.sqrt();
    Ok(AdfResult {
        stat,
        p_value: mackinnon_p_value(stat),
        lags,
        nobs,
    })
}

// MacKinnon (1994) response-surface coefficients, one I(1) series, constant.
const TAU_MAX: f64 = 2.74;
const TAU_MIN: f64 = -18.83;
const TAU_STAR: f64 = -1.61;
const SMALL_P: [f64; 3] = [2.1659, 1.4412, 0.038269];
const LARGE_P: [f64; 4] = [1.7339, 0.93202, -0.12745, -0.010368];

/// Approximate asymptotic p-value for a constant-only ADF statistic.
pub fn mackinnon_p_value(stat: f64) -> f64 {
    if stat.is_nan() {
        return f64::NAN;
    }
    if stat > TAU_MAX {
        return 1.0;
    }
    if stat < TAU_MIN {
        return 0.0;
    }
    let coefs: &[f64] = if stat <= TAU_STAR { &SMALL_P } else { &LARGE_P };
    let z = coefs.iter().rev().fold(0.0, |acc, c| acc * stat + c);
    standard_normal().cdf(z).clamp(0.0, 1.0)
}

pub(crate) fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}
