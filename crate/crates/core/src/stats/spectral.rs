//! Periodogram-based metrics.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::sampler::mean_std;

/// `|X_k|² / L` for `k = 1..=⌊L/2⌋` (DC excluded).
pub fn periodogram(series: &[f64]) -> Vec<f64> {
    let n = series.len();
    if n < 2 {
        return Vec::new();
    }
    let mut buf: Vec<Complex<f64>> = series.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf[1..=n / 2].iter().map(|c| c.norm_sqr() / n as f64).collect()
}

/// One minus the normalized Shannon entropy of the standardized series'
/// periodogram. Near 1 for a pure tone, near 0 for white noise.
pub fn forecastability(series: &[f64]) -> Result<f64> {
    if series.len() < 16 {
        return Err(Error::arg(format!("forecastability needs at least 16 points, got {}", series.len())));
    }
    let (mean, std) = mean_std(series);
    if !(std > 1e-12 * mean.abs().max(1.0)) {
        return Err(Error::DegenerateInput("forecastability of a constant series".into()));
    }
    let z: Vec<f64> = series.iter().map(|v| (v - mean) / std).collect();
    let power = periodogram(&z);
    let total: f64 = power.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateInput("periodogram carries no power".into()));
    }
    let entropy: f64 = power
        .iter()
        .map(|p| p / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    let max_entropy = (power.len() as f64).ln();
    Ok((1.0 - entropy / max_entropy).clamp(0.0, 1.0))
}

/// Mean periodogram power over positive frequencies of the raw series.
pub fn fft_mean(series: &[f64]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::arg("fft_mean needs at least 2 points"));
    }
    let power = periodogram(series);
    Ok(power.iter().sum::<f64>() / power.len() as f64)
}

/// Period implied by the strongest periodogram bin, `round(L / k*)`.
/// `None` when the spectrum is flat or empty.
pub fn dominant_period(series: &[f64]) -> Option<usize> {
    let (mean, std) = mean_std(series);
    if !(std > 1e-12 * mean.abs().max(1.0)) {
        return None;
    }
    let power = periodogram(series);
    let (kmax, pmax) = power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, p)| (i + 1, *p))?;
    let pmin = power.iter().copied().fold(f64::INFINITY, f64::min);
    if !(pmax > 0.0) || pmax - pmin <= 1e-9 * pmax {
        return None;
    }
    Some((series.len() as f64 / kmax as f64).round() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn tone_is_forecastable() {
        let x: Vec<f64> = (0..256).map(|t| (2.0 * PI * 8.0 * t as f64 / 256.0).sin()).collect();
        assert!(forecastability(&x).unwrap() >= 0.95);
    }

    #[test]
    fn scale_invariance() {
        let x: Vec<f64> = (0..128).map(|t| ((t * 7919) % 101) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.5 * v - 20.0).collect();
        let a = forecastability(&x).unwrap();
        let b = forecastability(&y).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn fft_mean_zero_and_scaling() {
        assert_eq!(fft_mean(&[0.0; 32]).unwrap(), 0.0);
        let x: Vec<f64> = (0..32).map(|t| (t as f64).cos() + 0.1 * t as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let (a, b) = (fft_mean(&x).unwrap(), fft_mean(&y).unwrap());
        assert!((b - 4.0 * a).abs() < 1e-10 * b);
    }

    #[test]
    fn constant_is_degenerate() {
        assert!(matches!(forecastability(&[1.0; 64]), Err(Error::DegenerateInput(_))));
        assert!(forecastability(&[1.0, 2.0]).is_err());
        assert_eq!(dominant_period(&[1.0; 64]), None);
    }

    #[test]
    fn dominant_period_of_tone() {
        let x: Vec<f64> = (0..256).map(|t| (2.0 * PI * t as f64 / 16.0).sin()).collect();
        assert_eq!(dominant_period(&x), Some(16));
    }
}
