//! Mann-Kendall monotonic trend test.

use statrs::distribution::ContinuousCDF;

use super::adf::standard_normal;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannKendall {
    pub s: i64,
    /// Variance of S under the null, tie-corrected.
    pub var_s: f64,
    pub z: f64,
    /// -1 downward, 0 no trend, 1 upward.
    pub trend: i8,
}

pub fn mann_kendall_s(series: &[f64]) -> i64 {
    let n = series.len();
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            s += match series[j].partial_cmp(&series[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    s
}

pub fn mann_kendall(series: &[f64], alpha: f64) -> Result<MannKendall> {
    let n = series.len();
    if n < 8 {
        return Err(Error::arg(format!("Mann-Kendall needs at least 8 points, got {n}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::arg(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if series.iter().any(|v| v.is_nan()) {
        return Err(Error::arg("Mann-Kendall input contains NaN"));
    }
    let s = mann_kendall_s(series);

    let mut sorted = series.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * (t - 1.0) * (2.0 * t + 5.0);
        i = j;
    }
    let nf = n as f64;
    let var_s = (nf * (nf - 1.0) * (2.0 * nf + 5.0) - tie_term) / 18.0;

    let z = if var_s <= 0.0 || s == 0 {
        0.0
    } else if s > 0 {
        (s as f64 - 1.0) / var_s.sqrt()
    } else {
        (s as f64 + 1.0) / var_s.sqrt()
    };
    let crit = standard_normal().inverse_cdf(1.0 - alpha / 2.0);
    let trend = if z.abs() > crit { z.signum() as i8 } else { 0 };
    Ok(MannKendall { s, var_s, z, trend })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_inputs() {
        let up: Vec<f64> = (1..=50).map(|v| v as f64).collect();
        let down: Vec<f64> = up.iter().rev().copied().collect();
        assert_eq!(mann_kendall(&up, 0.05).unwrap().trend, 1);
        assert_eq!(mann_kendall(&down, 0.05).unwrap().trend, -1);
        assert_eq!(mann_kendall(&up, 0.05).unwrap().s, 50 * 49 / 2);
    }

    #[test]
    fn constant_has_no_trend() {
        let r = mann_kendall(&[3.0; 12], 0.05).unwrap();
        assert_eq!(r.s, 0);
        assert_eq!(r.trend, 0);
        assert_eq!(r.var_s, 0.0);
    }

    #[test]
    fn tie_correction() {
        let x = [1.0, 2.0, 2.0, 3.0, 3.0, 3.0, 4.0, 5.0];
        let r = mann_kendall(&x, 0.05).unwrap();
        // n=8: 8·7·21 = 1176; ties t=2 (2·1·9=18) and t=3 (3·2·11=66)
        assert!((r.var_s - (1176.0 - 84.0) / 18.0).abs() < 1e-12);
    }

    #[test]
    fn short_input() {
        assert!(mann_kendall(&[1.0; 7], 0.05).is_err());
    }
}
