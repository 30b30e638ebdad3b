//! Seasonal-trend decomposition by loess, non-robust variant.
//!
//! Follows the original Fortran routine (inner loop: cycle-subseries
//! smoothing, low-pass filter of the seasonal, loess trend) with all
//! smoother degrees 1 and jumps 1.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StlParams {
    pub period: usize,
    pub seasonal_span: usize,
    pub trend_span: usize,
    pub low_pass_span: usize,
    pub inner_iterations: usize,
}

impl StlParams {
    pub const DEFAULT_SEASONAL_SPAN: usize = 15;

    pub fn new(period: usize) -> Self {
        Self::with_seasonal_span(period, Self::DEFAULT_SEASONAL_SPAN)
    }

    pub fn with_seasonal_span(period: usize, seasonal_span: usize) -> Self {
        let ns = seasonal_span as f64;
        let trend = (1.5 * period as f64 / (1.0 - 1.5 / ns)).ceil() as usize;
        Self {
            period,
            seasonal_span,
            trend_span: next_odd(trend),
            low_pass_span: next_odd(period + 1),
            inner_iterations: 2,
        }
    }
}

fn next_odd(v: usize) -> usize {
    if v % 2 == 0 {
        v + 1
    } else {
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub remainder: Vec<f64>,
}

pub fn stl(y: &[f64], params: &StlParams) -> Result<Decomposition> {
    let n = y.len();
    let np = params.period;
    if np < 2 {
        return Err(Error::arg("STL period must be at least 2"));
    }
    if n < 2 * np {
        return Err(Error::arg(format!("STL needs at least two full periods ({n} < 2 x {np})")));
    }
    for (name, span) in [
        ("seasonal", params.seasonal_span),
        ("trend", params.trend_span),
        ("low-pass", params.low_pass_span),
    ] {
        if span < 3 || span % 2 == 0 {
            return Err(Error::arg(format!("{name} span must be odd and at least 3, got {span}")));
        }
    }

    let mut trend = vec![0.0; n];
    let mut seasonal = vec![0.0; n];
    let mut detrended = vec![0.0; n];
    for _ in 0..params.inner_iterations.max(1) {
        for i in 0..n {
            detrended[i] = y[i] - trend[i];
        }
        let cycle = subseries_smooth(&detrended, np, params.seasonal_span);
        let filtered = low_pass(&cycle, np);
        let low = loess_smooth(&filtered, params.low_pass_span);
        for i in 0..n {
            seasonal[i] = cycle[np + i] - low[i];
        }
        let deseasonalized: Vec<f64> = y.iter().zip(&seasonal).map(|(a, s)| a - s).collect();
        trend = loess_smooth(&deseasonalized, params.trend_span);
    }
    let remainder = (0..n).map(|i| y[i] - trend[i] - seasonal[i]).collect();
    Ok(Decomposition {
        trend,
        seasonal,
        remainder,
    })
}

/// Local linear fit at abscissa `xs` using points `nleft..=nright` (1-based).
fn loess_estimate(y: &[f64], span: usize, xs: f64, nleft: usize, nright: usize, w: &mut [f64]) -> Option<f64> {
    let n = y.len();
    let range = n as f64 - 1.0;
    let mut h = (xs - nleft as f64).max(nright as f64 - xs);
    if span > n {
        h += ((span - n) / 2) as f64;
    }
    let h9 = 0.999 * h;
    let h1 = 0.001 * h;
    let mut total = 0.0;
    for j in nleft..=nright {
        let r = (j as f64 - xs).abs();
        let wj = if r <= h9 {
            if r <= h1 {
                1.0
            } else {
                (1.0 - (r / h).powi(3)).powi(3)
            }
        } else {
            0.0
        };
        w[j - 1] = wj;
        total += wj;
    }
    if total <= 0.0 {
        return None;
    }
    for j in nleft..=nright {
        w[j - 1] /= total;
    }
    if h > 0.0 {
        let center: f64 = (nleft..=nright).map(|j| w[j - 1] * j as f64).sum();
        let c: f64 = (nleft..=nright).map(|j| w[j - 1] * (j as f64 - center).powi(2)).sum();
        if c.sqrt() > 0.001 * range {
            let b = (xs - center) / c;
            for j in nleft..=nright {
                w[j - 1] *= b * (j as f64 - center) + 1.0;
            }
        }
    }
    Some((nleft..=nright).map(|j| w[j - 1] * y[j - 1]).sum())
}

fn loess_smooth(y: &[f64], span: usize) -> Vec<f64> {
    let n = y.len();
    if n < 2 {
        return y.to_vec();
    }
    let mut w = vec![0.0; n];
    let mut out = vec![0.0; n];
    if span >= n {
        for i in 1..=n {
            out[i - 1] = loess_estimate(y, span, i as f64, 1, n, &mut w).unwrap_or(y[i - 1]);
        }
        return out;
    }
    let half = (span + 1) / 2;
    let (mut nleft, mut nright) = (1, span);
    for i in 1..=n {
        if i > half && nright != n {
            nleft += 1;
            nright += 1;
        }
        out[i - 1] = loess_estimate(y, span, i as f64, nleft, nright, &mut w).unwrap_or(y[i - 1]);
    }
    out
}

/// Smooths each cycle-subseries and extends it one period on both sides;
/// output has `n + 2·period` values.
fn subseries_smooth(y: &[f64], period: usize, span: usize) -> Vec<f64> {
    let n = y.len();
    let mut season = vec![0.0; n + 2 * period];
    let mut w = vec![0.0; n / period + 1];
    for j in 0..period {
        let sub: Vec<f64> = y.iter().skip(j).step_by(period).copied().collect();
        let k = sub.len();
        let smooth = loess_smooth(&sub, span);
        let left = loess_estimate(&sub, span, 0.0, 1, span.min(k), &mut w).unwrap_or(smooth[0]);
        let nleft = if k + 1 > span { k + 1 - span } else { 1 };
        let right = loess_estimate(&sub, span, (k + 1) as f64, nleft, k, &mut w).unwrap_or(smooth[k - 1]);
        season[j] = left;
        for (m, v) in smooth.iter().enumerate() {
            season[(m + 1) * period + j] = *v;
        }
        season[(k + 1) * period + j] = right;
    }
    season
}

fn moving_average(x: &[f64], len: usize) -> Vec<f64> {
    let flen = len as f64;
    let mut sum: f64 = x[..len].iter().sum();
    let mut out = Vec::with_capacity(x.len() - len + 1);
    out.push(sum / flen);
    for k in len..x.len() {
        sum += x[k] - x[k - len];
        out.push(sum / flen);
    }
    out
}

fn low_pass(x: &[f64], period: usize) -> Vec<f64> {
    let a = moving_average(x, period);
    let b = moving_average(&a, period);
    moving_average(&b, 3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spans() {
        let p = StlParams::with_seasonal_span(12, 7);
        assert_eq!(p.trend_span, 23);
        assert_eq!(p.low_pass_span, 13);
        let p = StlParams::new(16);
        assert_eq!(p.low_pass_span, 17);
        assert_eq!(p.trend_span, 27);
    }

    #[test]
    fn components_add_up() {
        let y: Vec<f64> = (0..120)
            .map(|t| 0.1 * t as f64 + (t as f64 * 0.7).sin() + ((t * 37 % 11) as f64 / 11.0))
            .collect();
        let d = stl(&y, &StlParams::new(10)).unwrap();
        for i in 0..y.len() {
            assert!((y[i] - d.trend[i] - d.seasonal[i] - d.remainder[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_short_series_and_bad_spans() {
        assert!(stl(&[0.0; 10], &StlParams::new(6)).is_err());
        let mut p = StlParams::new(4);
        p.seasonal_span = 8;
        assert!(stl(&[0.0; 40], &p).is_err());
    }
}
