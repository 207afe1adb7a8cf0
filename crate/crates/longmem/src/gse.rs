//! The Gaussian semiparametric estimator of the fractional differencing
//! vector d: objective S(d), the matrix Ĝ(d), analytic score and Hessian,
//! and the box-constrained multi-start minimization producing d̂.
//!
//! With f_n a spectral density estimate on the first m Fourier frequencies,
//!
//! ```text
//! Ĝ(d) = m⁻¹ Σ_j Re[ diag(λ_j^{d_i}) f_n(λ_j) diag(λ_j^{d_i}) ]
//! S(d) = log det Ĝ(d) − 2 Σ_k d_k · m⁻¹ Σ_j log λ_j
//! d̂   = argmin over the admissible box
//! ```
//!
//! The diagonal scaling inverts the λ^{-d_i} pole of the local spectral
//! model, so Ĝ(d₀) concentrates around a constant matrix. The score and
//! Hessian use the J_k matrices (log-weighted versions of Ĝ) through
//! ∂Ĝ/∂d_r = I_(r)J₁ + J₁I_(r) and its second-order analogue.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{arg_err, num_err, LongmemError, Result};
use crate::linalg;
use crate::optim::{nelder_mead_box, NelderMeadOptions, NmOutcome};
use crate::series::MultiSeries;
use crate::spectral::{
    bartlett_weights, fourier_grid, periodogram, smoothed_periodogram, tapered_periodogram,
    EstimatorKind, SpectralEstimate, Taper,
};

/// Bandwidth rule m = ⌊n^alpha⌋ for the number of Fourier frequencies in
/// the objective; alpha = 0.85 is the usual choice.
pub fn bandwidth_m(n: usize, alpha: f64) -> usize {
    ((n as f64).powf(alpha).floor() as usize).max(1)
}

/// Closed admissible box for d, contained in (-0.5, 0.5)^q.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ParamSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return arg_err("parameter space needs matching nonempty bounds");
        }
        for (lo, up) in lower.iter().zip(&upper) {
            if !(lo < up) {
                return arg_err(format!("parameter space: lower {lo} not below upper {up}"));
            }
            if *lo <= -0.5 || *up >= 0.5 {
                return arg_err("parameter space must be contained in (-0.5, 0.5)");
            }
        }
        Ok(Self { lower, upper })
    }

    /// Default box [-0.499, 0.499]^q.
    pub fn symmetric(q: usize) -> Self {
        Self {
            lower: vec![-0.499; q],
            upper: vec![0.499; q],
        }
    }

    /// Consistency-restricted box Ω_β = [-β/2, 0]^q ∩ (-1/2, 0]^q for an
    /// n^β-consistent spectral density estimator. The open end at -1/2 is
    /// closed off at -0.499, matching the default-box convention.
    pub fn omega_beta(q: usize, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return arg_err(format!("omega_beta: beta={beta} outside (0, 1]"));
        }
        let lower = (-beta / 2.0).max(-0.499);
        Self::new(vec![lower; q], vec![0.0; q])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, d: &[f64]) -> bool {
        d.len() == self.dim()
            && d.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, up))| x >= lo && x <= up)
    }

    fn on_boundary(&self, d: &[f64], tol: f64) -> bool {
        d.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .any(|(x, (lo, up))| (x - lo).abs() <= tol || (x - up).abs() <= tol)
    }
}

/// Result of one GSE fit.
#[derive(Debug, Clone)]
pub struct GseFit {
    /// Estimated fractional differencing vector.
    pub d_hat: Vec<f64>,
    /// Ĝ(d̂), symmetric positive definite.
    pub g_hat: Array2<f64>,
    /// S(d̂).
    pub objective: f64,
    /// Iterations of the winning optimizer start.
    pub iterations: usize,
    /// Simplex diameter of the winning start fell below tolerance.
    pub converged: bool,
    /// d̂ lies on the boundary of the admissible box.
    pub at_boundary: bool,
    /// Number of frequencies in the objective.
    pub m: usize,
    /// Which spectral estimator fed the objective.
    pub estimator_kind: EstimatorKind,
    /// Multi-start diagnostics.
    pub starts: usize,
    pub function_evals: usize,
}

// ---------------------------------------------------------------------------
// objective machinery
// ---------------------------------------------------------------------------

struct GseCache {
    q: usize,
    m: usize,
    log_lambdas: Vec<f64>,
    mean_log_lambda: f64,
    re_f: Vec<Array2<f64>>,
}

impl GseCache {
    fn new(estimate: &SpectralEstimate, m: usize) -> Result<Self> {
        if m < 1 || m > estimate.len() {
            return arg_err(format!(
                "m={m} outside 1..={} grid points of the estimate",
                estimate.len()
            ));
        }
        if estimate.grid().indices()[0] == 0 {
            return arg_err("objective grid must not contain the zero frequency");
        }
        let log_lambdas: Vec<f64> = estimate.grid().lambdas()[..m]
            .iter()
            .map(|l| l.ln())
            .collect();
        let mean_log_lambda = log_lambdas.iter().sum::<f64>() / m as f64;
        let re_f: Vec<Array2<f64>> = estimate.matrices()[..m]
            .iter()
            .map(|f| f.mapv(|z| z.re))
            .collect();
        Ok(Self {
            q: estimate.q(),
            m,
            log_lambdas,
            mean_log_lambda,
            re_f,
        })
    }

    fn check_d(&self, d: &[f64]) -> Result<()> {
        if d.len() != self.q {
            return arg_err(format!(
                "d has {} entries for a {}-dimensional series",
                d.len(),
                self.q
            ));
        }
        if d.iter().any(|v| !v.is_finite()) {
            return arg_err("d has non-finite entries");
        }
        Ok(())
    }

    /// J_k(d) = m⁻¹ Σ_j (log λ_j)^k diag(λ_j^{d}) Re[f_n(λ_j)] diag(λ_j^{d});
    /// k = 0 is Ĝ(d).
    fn j_k(&self, d: &[f64], k: u32) -> Array2<f64> {
        let q = self.q;
        let mut acc = Array2::<f64>::zeros((q, q));
        let mut scale = vec![0.0; q];
        for (j, re_f) in self.re_f.iter().enumerate() {
            let ll = self.log_lambdas[j];
            for i in 0..q {
                scale[i] = (d[i] * ll).exp();
            }
            let w = ll.powi(k as i32);
            for r in 0..q {
                let wr = w * scale[r];
                for s in 0..q {
                    acc[[r, s]] += wr * scale[s] * re_f[[r, s]];
                }
            }
        }
        acc.mapv_into(|v| v / self.m as f64)
    }

    fn g_hat(&self, d: &[f64]) -> Array2<f64> {
        self.j_k(d, 0)
    }

    /// S(d); +∞ when Ĝ(d) is not positive definite (infeasible point).
    fn objective(&self, d: &[f64]) -> f64 {
        let g = self.g_hat(d);
        match linalg::spd_log_det(&g) {
            Some(log_det) => log_det - 2.0 * d.iter().sum::<f64>() * self.mean_log_lambda,
            None => f64::INFINITY,
        }
    }

    fn g_inverse(&self, d: &[f64]) -> Result<Array2<f64>> {
        linalg::spd_inverse(&self.g_hat(d))
            .map_err(|_| LongmemError::Numerical("Ĝ(d) is not positive definite".into()))
    }

    /// ∂Ĝ/∂d_r = I_(r) J₁ + J₁ I_(r).
    fn g_derivative(&self, j1: &Array2<f64>, r: usize) -> Array2<f64> {
        let ind = indicator(self.q, r);
        ind.dot(j1) + j1.dot(&ind)
    }

    fn score(&self, d: &[f64]) -> Result<Array1<f64>> {
        let inv = self.g_inverse(d)?;
        let j1 = self.j_k(d, 1);
        let mut out = Array1::<f64>::zeros(self.q);
        for r in 0..self.q {
            let p = self.g_derivative(&j1, r);
            out[r] = trace_of_product(&inv, &p) - 2.0 * self.mean_log_lambda;
        }
        Ok(out)
    }

    fn hessian(&self, d: &[f64]) -> Result<Array2<f64>> {
        let inv = self.g_inverse(d)?;
        let j1 = self.j_k(d, 1);
        let j2 = self.j_k(d, 2);
        let q = self.q;
        let derivs: Vec<Array2<f64>> = (0..q).map(|r| self.g_derivative(&j1, r)).collect();
        let mut h = Array2::<f64>::zeros((q, q));
        for r in 0..q {
            for s in 0..q {
                let ir = indicator(q, r);
                let is = indicator(q, s);
                // ∂²Ĝ/∂d_r∂d_s = I_(r)I_(s)J₂ + I_(r)J₂I_(s) + I_(s)J₂I_(r) + J₂I_(r)I_(s)
                let second = ir.dot(&is).dot(&j2)
                    + ir.dot(&j2).dot(&is)
                    + is.dot(&j2).dot(&ir)
                    + j2.dot(&ir).dot(&is);
                let first = inv.dot(&derivs[r]).dot(&inv).dot(&derivs[s]);
                h[[r, s]] = -first.diag().sum() + trace_of_product(&inv, &second);
            }
        }
        Ok(h)
    }
}

fn indicator(q: usize, r: usize) -> Array2<f64> {
    let mut m = Array2::<f64>::zeros((q, q));
    m[[r, r]] = 1.0;
    m
}

fn trace_of_product(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    let q = a.nrows();
    let mut t = 0.0;
    for i in 0..q {
        for k in 0..q {
            t += a[[i, k]] * b[[k, i]];
        }
    }
    t
}

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

/// Ĝ(d) over the first m grid points of the estimate. Exactly symmetric by
/// construction (real part of a congruence of a Hermitian matrix).
pub fn g_hat(d: &[f64], estimate: &SpectralEstimate, m: usize) -> Result<Array2<f64>> {
    let cache = GseCache::new(estimate, m)?;
    cache.check_d(d)?;
    Ok(cache.g_hat(d))
}

/// Objective S(d) = log det Ĝ(d) − 2 Σ_k d_k m⁻¹ Σ_j log λ_j.
///
/// Returns +∞ when Ĝ(d) is not positive definite; the optimizer treats such
/// points as infeasible.
pub fn objective(d: &[f64], estimate: &SpectralEstimate, m: usize) -> Result<f64> {
    let cache = GseCache::new(estimate, m)?;
    cache.check_d(d)?;
    Ok(cache.objective(d))
}

/// Analytic gradient of S at d.
pub fn score(d: &[f64], estimate: &SpectralEstimate, m: usize) -> Result<Array1<f64>> {
    let cache = GseCache::new(estimate, m)?;
    cache.check_d(d)?;
    cache.score(d)
}

/// Analytic Hessian of S at d.
pub fn hessian(d: &[f64], estimate: &SpectralEstimate, m: usize) -> Result<Array2<f64>> {
    let cache = GseCache::new(estimate, m)?;
    cache.check_d(d)?;
    cache.hessian(d)
}

/// Local model spectrum f(λ) = Λ(d) G Λ̄(d)' with
/// Λ^{(k)}(d) = λ^{-d_k} e^{i(π-λ)d_k/2}. Hermitian whenever G is symmetric.
pub fn model_spectrum(d: &[f64], g: &Array2<f64>, lambda: f64) -> Result<Array2<Complex64>> {
    let q = d.len();
    if g.dim() != (q, q) {
        return arg_err("model_spectrum: G must be q×q");
    }
    if !(0.0..=std::f64::consts::PI).contains(&lambda) {
        return arg_err(format!("model_spectrum: lambda={lambda} outside [0, π]"));
    }
    if lambda == 0.0 && d.iter().any(|&v| v > 0.0) {
        return num_err("model_spectrum: pole at zero frequency for positive d");
    }
    let lam: Vec<Complex64> = d
        .iter()
        .map(|&dk| {
            Complex64::from_polar(lambda.powf(-dk), (std::f64::consts::PI - lambda) * dk / 2.0)
        })
        .collect();
    let mut f = Array2::<Complex64>::zeros((q, q));
    for r in 0..q {
        for s in 0..q {
            f[[r, s]] = lam[r] * g[[r, s]] * lam[s].conj();
        }
    }
    Ok(f)
}

/// Spectral density estimator selection for the estimation pipeline.
#[derive(Debug, Clone)]
pub enum EstimatorConfig {
    /// Raw periodogram.
    Raw,
    /// Smoothed periodogram with Bartlett weights of bandwidth ell.
    Smoothed {
        ell: usize,
        normalize: bool,
        skip_pole: bool,
    },
    /// Tapered periodogram.
    Tapered { taper: Taper },
}

impl EstimatorConfig {
    pub fn kind(&self) -> EstimatorKind {
        match self {
            EstimatorConfig::Raw => EstimatorKind::Raw,
            EstimatorConfig::Smoothed { .. } => EstimatorKind::Smoothed,
            EstimatorConfig::Tapered { .. } => EstimatorKind::Tapered,
        }
    }

    /// Cosine-bell tapered periodogram.
    pub fn cosine_bell_tapered() -> Self {
        EstimatorConfig::Tapered {
            taper: Taper::cosine_bell(),
        }
    }
}

/// Full configuration of one estimation run.
#[derive(Debug, Clone)]
pub struct EstimateConfig {
    pub estimator: EstimatorConfig,
    /// Number of Fourier frequencies in the objective; must satisfy m < n/2.
    pub m: usize,
    /// Admissible box; `None` uses the default [-0.499, 0.499]^q.
    pub space: Option<ParamSpace>,
    /// Subtract per-component sample means before the transforms.
    pub center: bool,
    pub optimizer: NelderMeadOptions,
}

impl EstimateConfig {
    pub fn new(estimator: EstimatorConfig, m: usize) -> Self {
        Self {
            estimator,
            m,
            space: None,
            center: true,
            optimizer: NelderMeadOptions::default(),
        }
    }
}

/// Build the configured spectral estimate for a series.
pub fn build_spectral_estimate(
    series: &MultiSeries,
    config: &EstimateConfig,
) -> Result<SpectralEstimate> {
    let n = series.n();
    if 2 * config.m >= n {
        return arg_err(format!("need m < n/2, got m={}, n={n}", config.m));
    }
    let grid = fourier_grid(n, config.m)?;
    let centered;
    let input = if config.center {
        centered = series.centered();
        &centered
    } else {
        series
    };
    match &config.estimator {
        EstimatorConfig::Raw => periodogram(input, &grid),
        EstimatorConfig::Smoothed {
            ell,
            normalize,
            skip_pole,
        } => {
            let scheme = bartlett_weights(n, *ell, *normalize)?.with_skip_pole(*skip_pole);
            smoothed_periodogram(input, &grid, &scheme)
        }
        EstimatorConfig::Tapered { taper } => tapered_periodogram(input, &grid, taper),
    }
}

/// Estimate d̂ for a series: build the configured spectral estimate, then
/// minimize S(d) over the admissible box.
pub fn estimate(series: &MultiSeries, config: &EstimateConfig) -> Result<GseFit> {
    let estimate = build_spectral_estimate(series, config)?;
    let space = match &config.space {
        Some(s) => {
            if s.dim() != series.q() {
                return arg_err("parameter space dimension does not match the series");
            }
            s.clone()
        }
        None => ParamSpace::symmetric(series.q()),
    };
    fit_spectral(&estimate, config.m, &space, &config.optimizer)
}

/// Minimize S(d) for an already-computed spectral estimate.
///
/// Multi-start protocol: a 5-level coarse grid per dimension (full product
/// for q ≤ 3, a 125-point cycled selection otherwise) plus the zero vector;
/// Nelder–Mead with box clamping from each start; the lowest converged
/// objective wins, with ties within 1e-12 broken by the lexicographically
/// smallest d̂.
pub fn fit_spectral(
    estimate: &SpectralEstimate,
    m: usize,
    space: &ParamSpace,
    optimizer: &NelderMeadOptions,
) -> Result<GseFit> {
    if space.dim() != estimate.q() {
        return arg_err("parameter space dimension does not match the estimate");
    }
    let cache = GseCache::new(estimate, m)?;
    let starts = coarse_starts(space);
    let mut total_evals = 0usize;
    let mut best: Option<NmOutcome> = None;
    for start in &starts {
        let outcome = nelder_mead_box(
            |d| cache.objective(d),
            start,
            space.lower(),
            space.upper(),
            optimizer,
        );
        total_evals += outcome.evals;
        best = Some(match best.take() {
            None => outcome,
            Some(cur) => pick_winner(cur, outcome),
        });
    }
    let best = best.expect("at least one start");
    if !best.value.is_finite() {
        return Err(LongmemError::EstimationFailed(format!(
            "Ĝ(d) not positive definite at any of the {} starts ({} evaluations); \
             the spectrum is degenerate (constant or collinear components?)",
            starts.len(),
            total_evals
        )));
    }
    let d_hat = best.x.clone();
    let g = cache.g_hat(&d_hat);
    Ok(GseFit {
        at_boundary: space.on_boundary(&d_hat, 1e-7),
        d_hat,
        g_hat: g,
        objective: best.value,
        iterations: best.iterations,
        converged: best.converged,
        m,
        estimator_kind: estimate.kind(),
        starts: starts.len(),
        function_evals: total_evals,
    })
}

/// Prefer converged outcomes, then lower objective; ties within 1e-12 go to
/// the lexicographically smaller point. Order-independent.
fn pick_winner(a: NmOutcome, b: NmOutcome) -> NmOutcome {
    if a.converged != b.converged {
        return if a.converged { a } else { b };
    }
    if (a.value - b.value).abs() <= 1e-12 || (a.value.is_infinite() && b.value.is_infinite()) {
        return if lex_less(&a.x, &b.x) { a } else { b };
    }
    if a.value < b.value {
        a
    } else {
        b
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

fn coarse_starts(space: &ParamSpace) -> Vec<Vec<f64>> {
    let q = space.dim();
    let levels: Vec<Vec<f64>> = (0..q)
        .map(|i| {
            let lo = space.lower()[i];
            let width = space.upper()[i] - lo;
            (0..5)
                .map(|k| lo + (k as f64 + 0.5) * width / 5.0)
                .collect()
        })
        .collect();
    let mut starts = Vec::new();
    if q <= 3 {
        let total = 5usize.pow(q as u32);
        for mut code in 0..total {
            let mut point = Vec::with_capacity(q);
            for lv in levels.iter() {
                point.push(lv[code % 5]);
                code /= 5;
            }
            starts.push(point);
        }
    } else {
        // 5^3 points with base-5 digits cycled over the dimensions
        for code in 0..125usize {
            let digits = [code % 5, (code / 5) % 5, (code / 25) % 5];
            let point = (0..q).map(|i| levels[i][digits[i % 3]]).collect();
            starts.push(point);
        }
    }
    let zero: Vec<f64> = (0..q)
        .map(|i| 0f64.clamp(space.lower()[i], space.upper()[i]))
        .collect();
    starts.push(zero);
    starts
}
