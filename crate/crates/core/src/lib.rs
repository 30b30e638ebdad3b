//! Synthetic series-symbol data generation.
//!
//! The crate samples random symbolic expressions, drives them with random
//! input series (mixture distributions or stationary ARMA processes), and
//! packages the resulting `(X, Y = f(X), text)` triples for pre-training.
//! Alongside the generator it ships the statistics used to characterize the
//! generated series, forward-only reference math for the pre-training
//! objectives, and the point-masking / pre-interpolation preprocessing used
//! for imputation.
//!
//! Module map:
//!
//! - [`expr`]: expression trees, sampling, evaluation, text format.
//! - [`sampler`]: input series generators and channel standardization.
//! - [`generator`]: pair generation, dataset assembly, patching.
//! - [`stats`]: ADF, forecastability, FFT mean, permutation entropy,
//!   STL seasonality, Mann-Kendall, Radviz.
//! - [`losses`]: MTM / MLM / contrastive / distillation losses and EMA.
//! - [`imputeprep`]: point masks and neighbour pre-interpolation.
//! - [`io`]: run configuration, shard files, manifests.

pub mod error;
pub mod expr;
pub mod generator;
pub mod imputeprep;
pub mod io;
pub mod losses;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
