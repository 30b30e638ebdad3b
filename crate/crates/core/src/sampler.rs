//! Input series generators: i.i.d. draws from random mixtures, and
//! random stationary ARMA(p, q) processes.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Component {
    Gaussian { mean: f64, std: f64 },
    /// Uniform over `[low, high]`.
    Uniform { low: f64, high: f64 },
}

impl Component {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Component::Gaussian { mean, std } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + std * z
            }
            Component::Uniform { low, high } => low + (high - low) * rng.random::<f64>(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub weights: Vec<f64>,
    pub components: Vec<Component>,
}

impl MixtureSpec {
    pub fn new(weights: Vec<f64>, components: Vec<Component>) -> Result<Self> {
        if weights.is_empty() || weights.len() != components.len() {
            return Err(Error::arg("mixture needs one weight per component and at least one component"));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::arg("mixture weights must be non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::arg(format!("mixture weights sum to {total}, expected 1")));
        }
        Ok(Self { weights, components })
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (w, c) in self.weights.iter().zip(&self.components) {
            acc += w;
            if u < acc {
                return c.draw(rng);
            }
        }
        // Rounding can leave the cumulative sum a hair below 1.
        self.components[self.components.len() - 1].draw(rng)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaSpec {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
}

impl ArmaSpec {
    pub fn p(&self) -> usize {
        self.ar.len()
    }

    pub fn q(&self) -> usize {
        self.ma.len()
    }

    /// `φ_1 + … + φ_p < 1` and `|φ_p| < 1`.
    pub fn satisfies_ar_constraint(&self) -> bool {
        satisfies_ar_constraint(&self.ar)
    }

    pub fn burn_in(&self) -> usize {
        10 * (self.p() + self.q()) + 50
    }
}

pub fn satisfies_ar_constraint(ar: &[f64]) -> bool {
    match ar.last() {
        None => true,
        Some(last) => ar.iter().sum::<f64>() < 1.0 && last.abs() < 1.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InputSpec {
    Mixture(MixtureSpec),
    Arma(ArmaSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SourceKind {
    Mixture,
    Arma,
}

impl InputSpec {
    pub fn kind(&self) -> SourceKind {
        match self {
            InputSpec::Mixture(_) => SourceKind::Mixture,
            InputSpec::Arma(_) => SourceKind::Arma,
        }
    }
}

/// Orders and retry budget for input generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceParams {
    /// A uniform draw `<= threshold` selects the mixture source.
    pub threshold: f64,
    pub k_max: usize,
    pub p_max: usize,
    pub q_max: usize,
    pub arma_max_retries: usize,
}

impl Default for SourceParams {
    fn default() -> Self {
        Self {
            threshold: 0.5,
            k_max: 5,
            p_max: 4,
            q_max: 4,
            arma_max_retries: 10_000,
        }
    }
}

pub fn sample_mixture_spec<R: Rng + ?Sized>(k_max: usize, rng: &mut R) -> Result<MixtureSpec> {
    if k_max == 0 {
        return Err(Error::arg("k_max must be at least 1"));
    }
    let k = rng.random_range(1..=k_max);
    let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = if total > 0.0 {
        raw.iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / k as f64; k]
    };
    let components = (0..k)
        .map(|_| {
            let mean: f64 = StandardNormal.sample(rng);
            // U(0, 1) restricted to (0, 1].
            let std = 1.0 - rng.random::<f64>();
            if rng.random_bool(0.5) {
                Component::Gaussian { mean, std }
            } else {
                Component::Uniform {
                    low: mean.min(0.0),
                    high: mean.max(0.0),
                }
            }
        })
        .collect();
    MixtureSpec::new(weights, components)
}

const STABILITY_STEPS: usize = 4096;
const STABILITY_BOUND: f64 = 1e8;

/// Rejects AR polynomials whose impulse response blows past `1e8` within
/// 4096 steps; the linear constraint alone admits explosive specs for p >= 2.
pub(crate) fn ar_response_bounded(ar: &[f64]) -> bool {
    let p = ar.len();
    if p == 0 {
        return true;
    }
    let mut hist = vec![0.0f64; p];
    let mut head = 0;
    for t in 0..STABILITY_STEPS {
        let mut v = if t == 0 { 1.0 } else { 0.0 };
        for (i, phi) in ar.iter().enumerate() {
            v += phi * hist[(head + p - 1 - i) % p];
        }
        if !v.is_finite() || v.abs() > STABILITY_BOUND {
            return false;
        }
        hist[head] = v;
        head = (head + 1) % p;
    }
    true
}

pub fn sample_arma_spec<R: Rng + ?Sized>(p_max: usize, q_max: usize, max_retries: usize, rng: &mut R) -> Result<ArmaSpec> {
    if p_max == 0 || q_max == 0 {
        return Err(Error::arg("ARMA orders p_max and q_max must be at least 1"));
    }
    let p = rng.random_range(1..=p_max);
    let q = rng.random_range(1..=q_max);
    let ma: Vec<f64> = (0..q).map(|_| rng.random_range(-1.0..1.0)).collect();
    for _ in 0..max_retries.max(1) {
        let ar: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
        if satisfies_ar_constraint(&ar) && ar_response_bounded(&ar) {
            return Ok(ArmaSpec { ar, ma });
        }
    }
    Err(Error::SamplingExhausted {
        attempts: max_retries,
        what: format!("AR({p}) coefficients satisfying the stationarity constraint"),
    })
}

pub fn sample_input_spec<R: Rng + ?Sized>(params: &SourceParams, rng: &mut R) -> Result<InputSpec> {
    let draw: f64 = rng.random();
    if draw <= params.threshold {
        sample_mixture_spec(params.k_max, rng).map(InputSpec::Mixture)
    } else {
        sample_arma_spec(params.p_max, params.q_max, params.arma_max_retries, rng).map(InputSpec::Arma)
    }
}

/// `channels × len` series; channels are independent draws from `spec`.
pub fn generate_series<R: Rng + ?Sized>(spec: &InputSpec, channels: usize, len: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if len == 0 {
        return Err(Error::arg("series length must be at least 1"));
    }
    let out: Vec<Vec<f64>> = (0..channels)
        .map(|_| match spec {
            InputSpec::Mixture(mix) => (0..len).map(|_| mix.draw(rng)).collect(),
            InputSpec::Arma(arma) => simulate_arma(arma, len, rng),
        })
        .collect();
    if out.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Internal("input generator produced a non-finite value".into()));
    }
    Ok(out)
}

/// `Y_t = Σ φ_i Y_{t-i} + e_t − Σ θ_j e_{t-j}`, zero history, burn-in discarded.
pub fn simulate_arma<R: Rng + ?Sized>(spec: &ArmaSpec, len: usize, rng: &mut R) -> Vec<f64> {
    let burn = spec.burn_in();
    let total = burn + len;
    let mut y = vec![0.0f64; total];
    let mut e = vec![0.0f64; total];
    for t in 0..total {
        let noise: f64 = StandardNormal.sample(rng);
        e[t] = noise;
        let mut v = noise;
        for (i, phi) in spec.ar.iter().enumerate() {
            if t > i {
                v += phi * y[t - 1 - i];
            }
        }
        for (j, theta) in spec.ma.iter().enumerate() {
            if t > j {
                v -= theta * e[t - 1 - j];
            }
        }
        y[t] = v;
    }
    y.split_off(burn)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    pub channels: Vec<Vec<f64>>,
    /// `true` where the channel's population std fell below `1e-12`; such
    /// channels are returned as zeros.
    pub degenerate: Vec<bool>,
}

impl Standardized {
    pub fn any_degenerate(&self) -> bool {
        self.degenerate.iter().any(|&d| d)
    }
}

pub fn standardize(x: &[Vec<f64>]) -> Standardized {
    let mut degenerate = Vec::with_capacity(x.len());
    let channels = x
        .iter()
        .map(|row| {
            let (mean, std) = mean_std(row);
            if !(std >= 1e-12) {
                degenerate.push(true);
                vec![0.0; row.len()]
            } else {
                degenerate.push(false);
                row.iter().map(|v| (v - mean) / std).collect()
            }
        })
        .collect();
    Standardized { channels, degenerate }
}

/// Mean and population standard deviation (two-pass).
pub fn mean_std(x: &[f64]) -> (f64, f64) {
    if x.is_empty() {
        return (0.0, 0.0);
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
