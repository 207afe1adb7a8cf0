// preconditions use `!(x > 0.0)` so that NaN fails validation too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Semiparametric estimation of the fractional differencing vector d for
//! multivariate long-range dependent time series.
//!
//! The estimator minimizes a localized frequency-domain Gaussian likelihood
//! built from a pluggable spectral density matrix estimate — the raw
//! periodogram, a smoothed periodogram (Bartlett weights) or a tapered
//! periodogram (cosine bell) — over the first m Fourier frequencies.
//! Around it the crate provides:
//!
//! - [`spectral`]: DFT, periodogram, smoothed and tapered estimators;
//! - [`gse`]: the objective S(d), Ĝ(d), analytic score/Hessian and the
//!   box-constrained multi-start minimizer;
//! - [`inference`]: the asymptotic covariance Ω, the bias-corrected Ĝ and
//!   Wald tests with χ² p-values;
//! - [`varfima`]: truncated-MA simulation of Gaussian VARFIMA(0, d, 0);
//! - [`montecarlo`]: a deterministic, parallel replication harness;
//! - [`transform`] and [`plot`]: the data plumbing used by the CLI.

pub mod error;
pub mod gse;
pub mod inference;
pub mod linalg;
pub mod montecarlo;
pub mod optim;
pub mod plot;
pub mod series;
pub mod spectral;
pub mod transform;
pub mod varfima;

mod special;

pub use error::{LongmemError, Result};
pub use series::MultiSeries;
pub use spectral::EstimatorKind;
