//! Permutation entropy of ordinal patterns.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Shannon entropy (nats) of the ordinal patterns of `m`-tuples with delay
/// `tau`. Ties rank by position: the earlier index is the smaller.
pub fn permutation_entropy(series: &[f64], m: usize, tau: usize) -> Result<f64> {
    let counts = ordinal_pattern_counts(series, m, tau)?;
    let total: usize = counts.iter().sum();
    let total = total as f64;
    Ok(counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum::<f64>()
        .max(0.0))
}

/// Counts per pattern, indexed by the pattern's Lehmer code (`m!` slots).
pub fn ordinal_pattern_counts(series: &[f64], m: usize, tau: usize) -> Result<Vec<usize>> {
    if !(2..=10).contains(&m) || tau == 0 {
        return Err(Error::arg(format!("embedding dimension must be in 2..=10 and delay positive, got m={m}, tau={tau}")));
    }
    if series.len() < m * tau + 1 {
        return Err(Error::arg(format!(
            "series of length {} is too short for m={m}, tau={tau}",
            series.len()
        )));
    }
    let span = (m - 1) * tau;
    let slots: usize = (1..=m).product();
    let mut counts = vec![0usize; slots];
    let mut order: Vec<usize> = Vec::with_capacity(m);
    for start in 0..series.len() - span {
        order.clear();
        order.extend(0..m);
        // Stable sort keeps earlier indices first among equal values
        // (including -0.0 against 0.0).
        order.sort_by(|&a, &b| {
            series[start + a * tau]
                .partial_cmp(&series[start + b * tau])
                .unwrap_or(Ordering::Equal)
        });
        counts[lehmer_code(&order)] += 1;
    }
    Ok(counts)
}

fn lehmer_code(perm: &[usize]) -> usize {
    let m = perm.len();
    let mut code = 0;
    for i in 0..m {
        let smaller_after = perm[i + 1..].iter().filter(|&&v| v < perm[i]).count();
        code = code * (m - i) + smaller_after;
    }
    code
}
