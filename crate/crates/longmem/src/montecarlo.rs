//! Replicated simulate→estimate experiments with per-configuration
//! aggregation of mean, standard deviation and mean square error.
//!
//! Determinism: replication r draws its seed from `replication_seed(base, r)`
//! and replications are reduced by index, so the output is bit-identical
//! across runs and across worker counts.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg_err, LongmemError, Result};
use crate::gse::{self, bandwidth_m, EstimateConfig, EstimatorConfig, ParamSpace};
use crate::spectral::EstimatorKind;
use crate::varfima::{simulate, VarfimaSpec};

/// One estimator configuration of a Monte Carlo design.
#[derive(Debug, Clone, Serialize)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    /// Objective bandwidth exponent: m = ⌊n^alpha⌋.
    pub alpha: f64,
    /// Smoothing bandwidth exponent (smoothed only): ℓ = ⌊n^beta⌋.
    pub beta: Option<f64>,
    /// Restrict the smoothing sum to k ≠ −j (smoothed only).
    pub skip_pole: bool,
}

impl EstimatorSpec {
    pub fn raw(alpha: f64) -> Self {
        Self {
            kind: EstimatorKind::Raw,
            alpha,
            beta: None,
            skip_pole: false,
        }
    }

    pub fn smoothed(alpha: f64, beta: f64, skip_pole: bool) -> Self {
        Self {
            kind: EstimatorKind::Smoothed,
            alpha,
            beta: Some(beta),
            skip_pole,
        }
    }

    pub fn tapered(alpha: f64) -> Self {
        Self {
            kind: EstimatorKind::Tapered,
            alpha,
            beta: None,
            skip_pole: false,
        }
    }
}

/// A full Monte Carlo design: a simulation template, the estimator
/// configurations to run on every replication, and the seeding.
#[derive(Debug, Clone)]
pub struct McDesign {
    pub template: VarfimaSpec,
    pub estimators: Vec<EstimatorSpec>,
    pub replications: usize,
    pub base_seed: u64,
    /// Admissible box for the optimizer; `None` uses the default.
    pub space: Option<ParamSpace>,
    /// Subtract sample means before estimation (default on).
    pub center: bool,
}

impl McDesign {
    pub fn new(
        template: VarfimaSpec,
        estimators: Vec<EstimatorSpec>,
        replications: usize,
        base_seed: u64,
    ) -> Self {
        Self {
            template,
            estimators,
            replications,
            base_seed,
            space: None,
            center: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return arg_err("montecarlo: need at least one replication");
        }
        if self.estimators.is_empty() {
            return arg_err("montecarlo: need at least one estimator configuration");
        }
        for e in &self.estimators {
            if !(e.alpha > 0.0 && e.alpha < 1.0) {
                return arg_err(format!("montecarlo: alpha={} outside (0,1)", e.alpha));
            }
            match (e.kind, e.beta) {
                (EstimatorKind::Smoothed, Some(b)) if b > 0.0 && b < 1.0 => {}
                (EstimatorKind::Smoothed, _) => {
                    return arg_err("montecarlo: smoothed estimator needs beta in (0,1)")
                }
                (_, None) => {}
                (_, Some(_)) => {
                    return arg_err("montecarlo: beta only applies to the smoothed estimator")
                }
            }
        }
        Ok(())
    }
}

/// Aggregates for one (estimator, component) cell.
#[derive(Debug, Clone, Serialize)]
pub struct McRow {
    pub estimator: EstimatorKind,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub skip_pole: bool,
    /// Component index (0-based).
    pub component: usize,
    pub mean: f64,
    pub st_d: f64,
    pub mse: f64,
    /// Replications that failed to estimate for this configuration.
    pub failures: usize,
}

/// The assembled table.
#[derive(Debug, Clone, Serialize)]
pub struct McTable {
    pub d_true: Vec<f64>,
    pub n: usize,
    pub truncation: usize,
    pub replications: usize,
    pub base_seed: u64,
    pub rows: Vec<McRow>,
}

/// Aggregation for a single cell: sample mean, standard deviation with
/// divisor R−1, and mse = R⁻¹ Σ (v − d_true)².
pub fn summarize(values: &[f64], d_true: f64) -> Result<Summary> {
    let r = values.len();
    if r < 2 {
        return arg_err("summarize: need at least two values");
    }
    let mean = values.iter().sum::<f64>() / r as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let st_d = (ss / (r as f64 - 1.0)).sqrt();
    let mse = values
        .iter()
        .map(|v| (v - d_true) * (v - d_true))
        .sum::<f64>()
        / r as f64;
    Ok(Summary { mean, st_d, mse })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub st_d: f64,
    pub mse: f64,
}

/// Seed for replication `rep`: splitmix64 finalizer over the base seed
/// advanced by the golden-ratio stride. Distinct replications get
/// well-separated ChaCha8 seeds, so parallel substreams stay disjoint.
pub fn replication_seed(base_seed: u64, rep: u64) -> u64 {
    let mut z = base_seed.wrapping_add(rep.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Run the design: for every replication, simulate once and fit every
/// estimator configuration; aggregate per component.
///
/// Failed fits are excluded and counted; more than 5% failures for any
/// configuration aborts the run.
pub fn run(design: &McDesign) -> Result<McTable> {
    design.validate()?;
    let n = design.template.n();
    let q = design.template.q();
    let reps = design.replications;

    let configs: Vec<EstimateConfig> = design
        .estimators
        .iter()
        .map(|e| {
            let m = bandwidth_m(n, e.alpha);
            let estimator = match e.kind {
                EstimatorKind::Raw => EstimatorConfig::Raw,
                EstimatorKind::Smoothed => EstimatorConfig::Smoothed {
                    ell: bandwidth_m(n, e.beta.expect("validated")),
                    normalize: true,
                    skip_pole: e.skip_pole,
                },
                EstimatorKind::Tapered => EstimatorConfig::cosine_bell_tapered(),
            };
            let mut c = EstimateConfig::new(estimator, m);
            c.space = design.space.clone();
            c.center = design.center;
            c
        })
        .collect();

    // one task per replication; results keyed by index
    let per_rep: Vec<Vec<Option<Vec<f64>>>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let seed = replication_seed(design.base_seed, rep as u64);
            let spec = design.template.with_seed(seed);
            let series = match simulate(&spec) {
                Ok(s) => s,
                Err(_) => return vec![None; configs.len()],
            };
            configs
                .iter()
                .map(|c| gse::estimate(&series, c).ok().map(|fit| fit.d_hat))
                .collect()
        })
        .collect();

    let mut rows = Vec::new();
    for (e_idx, espec) in design.estimators.iter().enumerate() {
        let fits: Vec<&Vec<f64>> = per_rep
            .iter()
            .filter_map(|rep| rep[e_idx].as_ref())
            .collect();
        let failures = reps - fits.len();
        if (failures as f64) > 0.05 * reps as f64 {
            return Err(LongmemError::EstimationFailed(format!(
                "montecarlo: {failures} of {reps} replications failed for the {} estimator",
                espec.kind
            )));
        }
        for comp in 0..q {
            let values: Vec<f64> = fits.iter().map(|d| d[comp]).collect();
            let s = summarize(&values, design.template.d()[comp])?;
            rows.push(McRow {
                estimator: espec.kind,
                alpha: espec.alpha,
                beta: espec.beta,
                skip_pole: espec.skip_pole,
                component: comp,
                mean: s.mean,
                st_d: s.st_d,
                mse: s.mse,
                failures,
            });
        }
    }
    Ok(McTable {
        d_true: design.template.d().to_vec(),
        n,
        truncation: design.template.truncation(),
        replications: reps,
        base_seed: design.base_seed,
        rows,
    })
}
