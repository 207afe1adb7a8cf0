//! Discrete Fourier transform and the three spectral density matrix
//! estimators (raw, smoothed, tapered) on the Fourier-frequency grid.
//!
//! Conventions:
//! - `w_n(λ) = (2πn)^{-1/2} Σ_{t=1..n} X_t e^{iλt}` and
//!   `I_n(λ) = w_n(λ) w̄_n(λ)'`.
//! - The tapered transform uses the same `e^{+itλ}` phase as the raw one;
//!   the two conventions differ only by conjugation of the off-diagonal
//!   cross spectra, which every consumer in this crate is invariant to
//!   (they take real parts of congruence transforms of Hermitian matrices).
//! - Frequencies outside the principal range wrap by 2π-periodicity of
//!   `w_n`, i.e. index arithmetic is modulo n.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, num_err, Result};
use crate::linalg;
use crate::series::MultiSeries;

/// Which spectral density estimator produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Raw,
    Smoothed,
    Tapered,
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorKind::Raw => write!(f, "raw"),
            EstimatorKind::Smoothed => write!(f, "smoothed"),
            EstimatorKind::Tapered => write!(f, "tapered"),
        }
    }
}

/// Fourier frequencies λ_j = 2πj/n for a fixed set of integer indices j.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    n: usize,
    indices: Vec<usize>,
    lambdas: Vec<f64>,
}

impl FrequencyGrid {
    /// Grid over an explicit index set. Indices must be strictly increasing
    /// and at most n; index 0 (zero frequency) is only meaningful for the
    /// smoothed estimator's one-sided variant.
    pub fn with_indices(n: usize, indices: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return arg_err("grid needs n >= 2");
        }
        if indices.is_empty() {
            return arg_err("grid needs at least one frequency");
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return arg_err("grid indices must be strictly increasing");
        }
        if *indices.last().unwrap() > n {
            return arg_err("grid index exceeds the sample size");
        }
        let lambdas = indices.iter().map(|&j| lambda_at(n, j)).collect();
        Ok(Self {
            n,
            indices,
            lambdas,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }
}

/// λ_j = 2πj/n, one multiplication and one division in this order.
#[inline]
pub fn lambda_at(n: usize, j: usize) -> f64 {
    TAU * (j as f64) / (n as f64)
}

/// The first m Fourier frequencies, λ_j = 2πj/n for j = 1..m.
///
/// m may reach the Nyquist index n/2, so the frequencies stay in (0, π].
pub fn fourier_grid(n: usize, m: usize) -> Result<FrequencyGrid> {
    if m < 1 || 2 * m > n {
        return arg_err(format!(
            "fourier_grid: need 1 <= m <= n/2, got m={m}, n={n}"
        ));
    }
    FrequencyGrid::with_indices(n, (1..=m).collect())
}

/// Discrete Fourier transform w_n(λ) of the raw series at an arbitrary
/// frequency (no mean removal; at Fourier frequencies the transform is
/// exactly invariant to constant shifts anyway).
pub fn dft(series: &MultiSeries, lambda: f64) -> Array1<Complex64> {
    let n = series.n();
    let q = series.q();
    let scale = 1.0 / (TAU * n as f64).sqrt();
    let mut out = Array1::<Complex64>::zeros(q);
    let values = series.values();
    for t in 1..=n {
        let phase = Complex64::from_polar(1.0, lambda * t as f64);
        for i in 0..q {
            out[i] += values[[t - 1, i]] * phase;
        }
    }
    out.mapv_into(|v| v * scale)
}

/// w_n at the Fourier indices `0..n-1`, computed with an exact table of the
/// n-th roots of unity (reference direct summation, O(n²) total).
fn dft_full_grid(series: &MultiSeries) -> Vec<Array1<Complex64>> {
    let roots = unit_roots(series.n());
    (0..series.n())
        .map(|j| dft_at_index_with(series, j, &roots))
        .collect()
}

/// w_n(λ_j) by direct summation over a precomputed root-of-unity table.
fn dft_at_index_with(series: &MultiSeries, j: usize, roots: &[Complex64]) -> Array1<Complex64> {
    let n = series.n();
    let q = series.q();
    let values = series.values();
    let scale = 1.0 / (TAU * n as f64).sqrt();
    let mut acc = Array1::<Complex64>::zeros(q);
    let mut idx = 0usize; // (j*t) mod n, stepped incrementally
    let step = j % n;
    for t in 0..n {
        idx += step;
        if idx >= n {
            idx -= n;
        }
        let root = roots[idx];
        for i in 0..q {
            acc[i] += values[[t, i]] * root;
        }
    }
    acc.mapv_into(|v| v * scale)
}

fn unit_roots(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
        .collect()
}

fn outer(w: &Array1<Complex64>) -> Array2<Complex64> {
    let q = w.len();
    let mut m = Array2::<Complex64>::zeros((q, q));
    for r in 0..q {
        for s in 0..q {
            m[[r, s]] = w[r] * w[s].conj();
        }
    }
    m
}

/// A spectral density matrix estimate f_n(λ_j) on a frequency grid:
/// one complex Hermitian q×q matrix per grid point.
#[derive(Debug, Clone)]
pub struct SpectralEstimate {
    grid: FrequencyGrid,
    matrices: Vec<Array2<Complex64>>,
    kind: EstimatorKind,
}

impl SpectralEstimate {
    /// Assemble an estimate from externally computed matrices — the hook for
    /// plugging spectral density estimators beyond the built-in three.
    pub fn from_parts(
        grid: FrequencyGrid,
        matrices: Vec<Array2<Complex64>>,
        kind: EstimatorKind,
    ) -> Result<Self> {
        if matrices.len() != grid.len() {
            return arg_err(format!(
                "estimate has {} matrices for {} grid points",
                matrices.len(),
                grid.len()
            ));
        }
        let q = matrices[0].nrows();
        if q == 0 || matrices.iter().any(|m| m.dim() != (q, q)) {
            return arg_err("estimate matrices must share one square shape");
        }
        Ok(Self {
            grid,
            matrices,
            kind,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn q(&self) -> usize {
        self.matrices[0].nrows()
    }

    /// Estimate at the k-th grid point.
    pub fn matrix(&self, k: usize) -> &Array2<Complex64> {
        &self.matrices[k]
    }

    pub fn matrices(&self) -> &[Array2<Complex64>] {
        &self.matrices
    }

    /// Largest deviation from Hermitian symmetry over the whole grid.
    pub fn max_hermitian_deviation(&self) -> f64 {
        self.matrices
            .iter()
            .map(linalg::max_hermitian_deviation)
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue over the whole grid (negative values measure the
    /// positive semidefiniteness defect).
    pub fn min_eigenvalue(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| {
                let vals = linalg::hermitian_eigenvalues(m);
                vals[0]
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// The periodogram I_n(λ_j) = w_n(λ_j) w̄_n(λ_j)' on the given grid.
/// Each matrix is an outer product: Hermitian, PSD, rank ≤ 1.
pub fn periodogram(series: &MultiSeries, grid: &FrequencyGrid) -> Result<SpectralEstimate> {
    check_series_grid(series, grid, false)?;
    let roots = unit_roots(series.n());
    let matrices = grid
        .indices()
        .iter()
        .map(|&j| outer(&dft_at_index_with(series, j, &roots)))
        .collect();
    Ok(SpectralEstimate {
        grid: grid.clone(),
        matrices,
        kind: EstimatorKind::Raw,
    })
}

fn check_series_grid(series: &MultiSeries, grid: &FrequencyGrid, allow_zero: bool) -> Result<()> {
    if grid.n() != series.n() {
        return arg_err(format!(
            "grid built for n={} but series has n={}",
            grid.n(),
            series.n()
        ));
    }
    if !allow_zero && grid.indices()[0] == 0 {
        return arg_err("zero frequency is only supported by the smoothed estimator");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// weight schemes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum Weights {
    /// One weight per lag, replicated across all q×q entries.
    Scalar(Vec<f64>),
    /// A full q×q weight matrix per lag, Hadamard-multiplied into the ordinates.
    Matrix(Vec<Array2<f64>>),
}

/// Symmetric nonnegative smoothing weights W(k), k = -ℓ..ℓ, applied to the
/// periodogram ordinates around each grid frequency.
#[derive(Debug, Clone)]
pub struct WeightScheme {
    n: usize,
    ell: usize,
    weights: Weights,
    skip_pole: bool,
}

impl WeightScheme {
    /// Scheme with one scalar weight per lag; `weights[k + ell]` is W(k).
    /// Validates symmetry W(k)=W(-k) and nonnegativity.
    pub fn scalar(n: usize, ell: usize, weights: Vec<f64>) -> Result<Self> {
        if ell < 1 || ell >= n {
            return arg_err(format!(
                "weight scheme: need 1 <= ell < n, got ell={ell}, n={n}"
            ));
        }
        if weights.len() != 2 * ell + 1 {
            return arg_err(format!(
                "weight scheme: expected {} weights, got {}",
                2 * ell + 1,
                weights.len()
            ));
        }
        for k in 0..=ell {
            let wp = weights[ell + k];
            let wm = weights[ell - k];
            if wp != wm {
                return arg_err(format!("weight scheme: W({k}) != W(-{k})"));
            }
            if !(wp >= 0.0) {
                return arg_err(format!("weight scheme: negative weight at k={k}"));
            }
        }
        Ok(Self {
            n,
            ell,
            weights: Weights::Scalar(weights),
            skip_pole: false,
        })
    }

    /// Scheme with a full q×q weight matrix per lag; `weights[k + ell]` is
    /// W(k). Validates entrywise symmetry in k and nonnegativity.
    pub fn matrix(n: usize, ell: usize, weights: Vec<Array2<f64>>) -> Result<Self> {
        if ell < 1 || ell >= n {
            return arg_err(format!(
                "weight scheme: need 1 <= ell < n, got ell={ell}, n={n}"
            ));
        }
        if weights.len() != 2 * ell + 1 {
            return arg_err("weight scheme: wrong number of lag matrices");
        }
        let q = weights[0].nrows();
        if weights.iter().any(|w| w.dim() != (q, q)) {
            return arg_err("weight scheme: lag matrices must share one square shape");
        }
        for k in 0..=ell {
            let wp = &weights[ell + k];
            let wm = &weights[ell - k];
            if wp != wm {
                return arg_err(format!("weight scheme: W({k}) != W(-{k})"));
            }
            if wp.iter().any(|&v| !(v >= 0.0)) {
                return arg_err(format!("weight scheme: negative weight at k={k}"));
            }
        }
        Ok(Self {
            n,
            ell,
            weights: Weights::Matrix(weights),
            skip_pole: false,
        })
    }

    /// Restrict the smoothing sum to k ≠ -j (omit the zero-frequency
    /// ordinate). The omitted weight mass is not redistributed.
    pub fn with_skip_pole(mut self, skip: bool) -> Self {
        self.skip_pole = skip;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn skip_pole(&self) -> bool {
        self.skip_pole
    }

    /// W(k) for a single entry (r, s); k may be negative.
    pub fn weight_entry(&self, k: i64, r: usize, s: usize) -> f64 {
        let idx = (k + self.ell as i64) as usize;
        match &self.weights {
            Weights::Scalar(w) => w[idx],
            Weights::Matrix(w) => w[idx][[r, s]],
        }
    }

    /// Largest absolute deviation of the per-entry lag sums from 1.
    pub fn sum_deviation(&self) -> f64 {
        match &self.weights {
            Weights::Scalar(w) => (w.iter().sum::<f64>() - 1.0).abs(),
            Weights::Matrix(w) => {
                let q = w[0].nrows();
                let mut dev: f64 = 0.0;
                for r in 0..q {
                    for s in 0..q {
                        let sum: f64 = w.iter().map(|m| m[[r, s]]).sum();
                        dev = dev.max((sum - 1.0).abs());
                    }
                }
                dev
            }
        }
    }

    /// Rescale so that every per-entry lag sum equals 1.
    pub fn normalized(mut self) -> Result<Self> {
        match &mut self.weights {
            Weights::Scalar(w) => {
                let sum: f64 = w.iter().sum();
                if !(sum > 0.0) {
                    return num_err("weight scheme: cannot normalize a zero-mass scheme");
                }
                for v in w.iter_mut() {
                    *v /= sum;
                }
            }
            Weights::Matrix(w) => {
                let q = w[0].nrows();
                for r in 0..q {
                    for s in 0..q {
                        let sum: f64 = w.iter().map(|m| m[[r, s]]).sum();
                        if !(sum > 0.0) {
                            return num_err("weight scheme: cannot normalize a zero-mass entry");
                        }
                        for m in w.iter_mut() {
                            m[[r, s]] /= sum;
                        }
                    }
                }
            }
        }
        Ok(self)
    }
}

/// Bartlett smoothing weights
/// W(k) = sin²(ℓλ_k/2) / (nℓ sin²(λ_k/2)), λ_k = 2πk/n,
/// with the limit value ℓ/n at k = 0. With `normalize` the weights are
/// rescaled to sum exactly to 1 over |k| ≤ ℓ.
pub fn bartlett_weights(n: usize, ell: usize, normalize: bool) -> Result<WeightScheme> {
    if ell < 1 || ell >= n {
        return arg_err(format!(
            "bartlett_weights: need 1 <= ell < n, got ell={ell}, n={n}"
        ));
    }
    let mut w = vec![0.0; 2 * ell + 1];
    w[ell] = ell as f64 / n as f64;
    for k in 1..=ell {
        let half = lambda_at(n, k) / 2.0;
        let s = half.sin();
        let v = (ell as f64 * half).sin().powi(2) / (n as f64 * ell as f64 * s * s);
        w[ell + k] = v;
        w[ell - k] = v;
    }
    let scheme = WeightScheme::scalar(n, ell, w)?;
    if normalize {
        scheme.normalized()
    } else {
        Ok(scheme)
    }
}

/// Smoothed periodogram
/// f_n(λ_j) = Σ_{|k|≤ℓ} W(k) ⊙ w_n(λ_{j+k}) w̄_n(λ_{j+k})',
/// with w_n extended 2π-periodically when j+k leaves the principal range.
/// Grid index 0 requests the one-sided real-part variant at zero frequency.
pub fn smoothed_periodogram(
    series: &MultiSeries,
    grid: &FrequencyGrid,
    scheme: &WeightScheme,
) -> Result<SpectralEstimate> {
    check_series_grid(series, grid, true)?;
    if scheme.n() != series.n() {
        return arg_err(format!(
            "weight scheme built for n={} but series has n={}",
            scheme.n(),
            series.n()
        ));
    }
    if let Weights::Matrix(w) = &scheme.weights {
        if w[0].nrows() != series.q() {
            return arg_err("weight scheme dimension does not match the series");
        }
    }
    let n = series.n() as i64;
    let q = series.q();
    let ell = scheme.ell() as i64;
    let w_full = dft_full_grid(series);
    let ordinates: Vec<Array2<Complex64>> = w_full.iter().map(outer).collect();

    let mut matrices = Vec::with_capacity(grid.len());
    for &j in grid.indices() {
        let mut f = Array2::<Complex64>::zeros((q, q));
        if j == 0 {
            // one-sided zero-frequency variant:
            // Re[ W(0) ⊙ I(λ_1) + 2 Σ_{k=1..ℓ} W(k) ⊙ I(λ_{k+1}) ]
            accumulate(&mut f, scheme, 0, &ordinates[1 % n as usize], 1.0);
            for k in 1..=ell {
                let idx = ((k + 1).rem_euclid(n)) as usize;
                accumulate(&mut f, scheme, k, &ordinates[idx], 2.0);
            }
            f.mapv_inplace(|v| Complex64::new(v.re, 0.0));
        } else {
            for k in -ell..=ell {
                if scheme.skip_pole() && k == -(j as i64) {
                    continue;
                }
                let idx = (j as i64 + k).rem_euclid(n) as usize;
                accumulate(&mut f, scheme, k, &ordinates[idx], 1.0);
            }
        }
        matrices.push(f);
    }
    Ok(SpectralEstimate {
        grid: grid.clone(),
        matrices,
        kind: EstimatorKind::Smoothed,
    })
}

fn accumulate(
    f: &mut Array2<Complex64>,
    scheme: &WeightScheme,
    k: i64,
    ordinate: &Array2<Complex64>,
    factor: f64,
) {
    let q = f.nrows();
    match &scheme.weights {
        Weights::Scalar(w) => {
            let wk = factor * w[(k + scheme.ell as i64) as usize];
            if wk == 0.0 {
                return;
            }
            for r in 0..q {
                for s in 0..q {
                    f[[r, s]] += wk * ordinate[[r, s]];
                }
            }
        }
        Weights::Matrix(w) => {
            let wk = &w[(k + scheme.ell as i64) as usize];
            for r in 0..q {
                for s in 0..q {
                    f[[r, s]] += factor * wk[[r, s]] * ordinate[[r, s]];
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// tapering
// ---------------------------------------------------------------------------

/// Cosine-bell taper h(u) = ½[1 - cos(2πu)] for u ≤ ½ and h(u) = h(1-u)
/// otherwise; continuous and symmetric about ½.
pub fn cosine_bell(u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return arg_err(format!("cosine_bell: u={u} outside [0,1]"));
    }
    let v = if u <= 0.5 { u } else { 1.0 - u };
    Ok(0.5 * (1.0 - (TAU * v).cos()))
}

type TaperFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Data taper: one function h_i: [0,1] → R per component (or one shared),
/// with the cached squared-integral H_i = ∫₀¹ h_i²(x) dx > 0.
#[derive(Clone)]
pub struct Taper {
    fns: Vec<TaperFn>,
    h_sq_integral: Vec<f64>,
}

impl fmt::Debug for Taper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Taper")
            .field("components", &self.fns.len())
            .field("h_sq_integral", &self.h_sq_integral)
            .finish()
    }
}

impl Taper {
    /// Single taper applied to every component.
    pub fn shared(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        Self::from_fns(vec![Arc::new(f) as TaperFn])
    }

    /// One taper per component.
    pub fn per_component(fns: Vec<TaperFn>) -> Result<Self> {
        if fns.is_empty() {
            return arg_err("taper needs at least one function");
        }
        Self::from_fns(fns)
    }

    /// The cosine-bell taper shared across components (H = 3/8).
    pub fn cosine_bell() -> Self {
        Self::shared(|u| 0.5 * (1.0 - (TAU * u.min(1.0 - u)).cos()))
            .expect("cosine-bell taper has positive energy")
    }

    fn from_fns(fns: Vec<TaperFn>) -> Result<Self> {
        let h_sq_integral: Vec<f64> = fns.iter().map(|f| simpson_sq(f.as_ref())).collect();
        if let Some((i, &h)) = h_sq_integral.iter().enumerate().find(|(_, &h)| !(h > 0.0)) {
            return arg_err(format!("taper component {i} has H = {h}, must be positive"));
        }
        Ok(Self { fns, h_sq_integral })
    }

    /// Cached H_i = ∫₀¹ h_i²(x) dx.
    pub fn h_sq_integral(&self) -> &[f64] {
        &self.h_sq_integral
    }

    fn component(&self, i: usize) -> &TaperFn {
        if self.fns.len() == 1 {
            &self.fns[0]
        } else {
            &self.fns[i]
        }
    }

    fn components_match(&self, q: usize) -> bool {
        self.fns.len() == 1 || self.fns.len() == q
    }
}

/// Composite Simpson on [0,1] with a fixed even panel count.
fn simpson_sq(f: &(dyn Fn(f64) -> f64 + Send + Sync)) -> f64 {
    let panels = 4096;
    let h = 1.0 / panels as f64;
    let g = |x: f64| {
        let v = f(x);
        v * v
    };
    let mut acc = g(0.0) + g(1.0);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(i as f64 * h);
    }
    acc * h / 3.0
}

/// Tapered periodogram I_T(λ_j) = w_T(λ_j) w̄_T(λ_j)' with
/// w_T(λ) = (2π)^{-1/2} Σ_t S_n(t) ⊙ X_t e^{itλ} and
/// S_n(t) = L_n(t) / (Σ_s L_n(s)²)^{1/2}, L_n(t) = h_i(t/n).
pub fn tapered_periodogram(
    series: &MultiSeries,
    grid: &FrequencyGrid,
    taper: &Taper,
) -> Result<SpectralEstimate> {
    check_series_grid(series, grid, false)?;
    let n = series.n();
    let q = series.q();
    if !taper.components_match(q) {
        return arg_err(format!(
            "taper has {} components but series has {q}",
            taper.fns.len()
        ));
    }
    // tapered data S_n(t) ⊙ X_t, then the same normalized transform shape
    // as the raw DFT up to the already-absorbed 1/sqrt(n)
    let mut tapered = Array2::<f64>::zeros((n, q));
    for i in 0..q {
        let h = taper.component(i);
        let l: Vec<f64> = (1..=n).map(|t| h(t as f64 / n as f64)).collect();
        let norm_sq: f64 = l.iter().map(|v| v * v).sum();
        if !(norm_sq > 0.0) {
            return num_err(format!(
                "degenerate taper: component {i} has zero energy on the sample"
            ));
        }
        let norm = norm_sq.sqrt();
        for t in 0..n {
            tapered[[t, i]] = l[t] / norm * series.values()[[t, i]];
        }
    }
    // w_T = (2π)^{-1/2} Σ S⊙X e^{itλ} = sqrt(n) * w_n(tapered series)
    let tapered_series = MultiSeries::new(tapered)?;
    let roots = unit_roots(n);
    let scale = (n as f64).sqrt();
    let matrices = grid
        .indices()
        .iter()
        .map(|&j| {
            let w = dft_at_index_with(&tapered_series, j, &roots).mapv_into(|v| v * scale);
            outer(&w)
        })
        .collect();
    Ok(SpectralEstimate {
        grid: grid.clone(),
        matrices,
        kind: EstimatorKind::Tapered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn white_noise(n: usize, q: usize, seed: u64) -> MultiSeries {
        // small LCG; test fixture only
        let mut state = seed
            .wrapping_mul(2862933555777941757)
            .wrapping_add(3037000493);
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            // map to (-1, 1)
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let mut v = Array2::<f64>::zeros((n, q));
        for t in 0..n {
            for i in 0..q {
                v[[t, i]] = next();
            }
        }
        MultiSeries::new(v).unwrap()
    }

    #[test]
    fn fourier_grid_examples() {
        let g = fourier_grid(8, 3).unwrap();
        assert_eq!(g.lambdas(), &[PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]);
        let g = fourier_grid(4, 2).unwrap();
        assert_eq!(g.lambdas(), &[PI / 2.0, PI]);
        let g = fourier_grid(1000, 354).unwrap();
        assert_eq!(g.len(), 354);
        assert!(fourier_grid(8, 5).is_err());
        assert!(fourier_grid(8, 0).is_err());
    }

    #[test]
    fn grid_lambdas_are_bit_exact() {
        let g = fourier_grid(1000, 354).unwrap();
        for (&j, &lam) in g.indices().iter().zip(g.lambdas()) {
            assert_eq!(lam, TAU * (j as f64) / 1000.0);
        }
    }

    #[test]
    fn dft_of_constant_vanishes_at_fourier_frequencies() {
        let s = MultiSeries::new(Array2::from_elem((16, 1), 3.7)).unwrap();
        for j in 1..8 {
            let w = dft(&s, lambda_at(16, j));
            assert!(w[0].norm() < 1e-12);
        }
    }

    #[test]
    fn dft_of_unit_impulse() {
        // impulse at t=1 -> w_n(λ) = e^{iλ}/sqrt(2πn) at any λ
        let mut v = Array2::<f64>::zeros((10, 1));
        v[[0, 0]] = 1.0;
        let s = MultiSeries::new(v).unwrap();
        for &lam in &[0.3, 1.1, PI, 2.5] {
            let w = dft(&s, lam);
            let expect = Complex64::from_polar(1.0, lam) / (TAU * 10.0).sqrt();
            assert!((w[0] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_cosine_line_power() {
        // X_t = cos(λ_j t), n=64, j=8 -> |w_n(λ_j)|² = n/(8π)
        let n = 64;
        let lam = lambda_at(n, 8);
        let v = Array2::from_shape_fn((n, 1), |(t, _)| (lam * (t + 1) as f64).cos());
        let s = MultiSeries::new(v).unwrap();
        let w = dft(&s, lam);
        assert!((w[0].norm_sqr() - n as f64 / (8.0 * PI)).abs() < 1e-10);
    }

    #[test]
    fn dft_table_route_matches_direct_sum() {
        let s = white_noise(64, 2, 9);
        let roots = unit_roots(64);
        for j in [1usize, 5, 17, 31, 32, 63] {
            let a = dft_at_index_with(&s, j, &roots);
            let b = dft(&s, lambda_at(64, j));
            for i in 0..2 {
                assert!((a[i] - b[i]).norm() < 1e-10, "index {j}");
            }
        }
    }

    #[test]
    fn periodogram_is_hermitian_rank_one() {
        let s = white_noise(32, 2, 4);
        let grid = fourier_grid(32, 16).unwrap();
        let p = periodogram(&s, &grid).unwrap();
        assert!(p.max_hermitian_deviation() < 1e-10);
        assert!(p.min_eigenvalue() > -1e-12);
        for k in 0..p.len() {
            let m = p.matrix(k);
            // rank <= 1: det of the 2x2 is 0
            let det = m[[0, 0]] * m[[1, 1]] - m[[0, 1]] * m[[1, 0]];
            assert!(det.norm() < 1e-12);
            assert!((m[[0, 1]] - m[[1, 0]].conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn periodogram_parseval_full_grid() {
        let s = white_noise(48, 1, 7);
        let grid = FrequencyGrid::with_indices(48, (1..=48).collect()).unwrap();
        let p = periodogram(&s, &grid).unwrap();
        let lhs: f64 = (0..p.len()).map(|k| p.matrix(k)[[0, 0]].re).sum();
        let rhs: f64 = s.column(0).iter().map(|x| x * x).sum::<f64>() / TAU;
        assert!((lhs - rhs).abs() < 1e-8 * rhs.abs());
    }

    #[test]
    fn periodogram_alternating_series_at_pi() {
        let n = 8;
        let v = Array2::from_shape_fn((n, 1), |(t, _)| if t % 2 == 0 { 1.0 } else { -1.0 });
        let s = MultiSeries::new(v).unwrap();
        let grid = FrequencyGrid::with_indices(n, vec![n / 2]).unwrap();
        let p = periodogram(&s, &grid).unwrap();
        assert!((p.matrix(0)[[0, 0]].re - n as f64 / TAU).abs() < 1e-12);
    }

    #[test]
    fn bartlett_limit_symmetry_and_sum() {
        let raw = bartlett_weights(100, 10, false).unwrap();
        assert_eq!(raw.weight_entry(0, 0, 0), 0.1); // ℓ/n
        for k in 1..=10i64 {
            assert_eq!(raw.weight_entry(k, 0, 0), raw.weight_entry(-k, 0, 0));
        }
        // frozen by direct summation of the Bartlett formula (oracle)
        let expected_sum = 0.9061787360939791;
        assert!((raw.sum_deviation() - (1.0 - expected_sum)).abs() < 1e-12);
        let norm = bartlett_weights(100, 10, true).unwrap();
        assert!(norm.sum_deviation() < 1e-12);
        assert!(bartlett_weights(100, 100, false).is_err());
        assert!(bartlett_weights(100, 0, false).is_err());
    }

    #[test]
    fn scheme_rejects_asymmetry_and_negativity() {
        let mut w = vec![0.25, 0.5, 0.3];
        assert!(WeightScheme::scalar(16, 1, w.clone()).is_err());
        w[2] = 0.25;
        assert!(WeightScheme::scalar(16, 1, w).is_ok());
        assert!(WeightScheme::scalar(16, 1, vec![-0.1, 1.2, -0.1]).is_err());
    }

    #[test]
    fn delta_weights_reproduce_the_periodogram_bitwise() {
        let s = white_noise(64, 2, 11);
        let grid = fourier_grid(64, 20).unwrap();
        let mut w = vec![0.0; 9];
        w[4] = 1.0;
        let scheme = WeightScheme::scalar(64, 4, w).unwrap();
        let sm = smoothed_periodogram(&s, &grid, &scheme).unwrap();
        let raw = periodogram(&s, &grid).unwrap();
        for k in 0..grid.len() {
            assert_eq!(sm.matrix(k), raw.matrix(k));
        }
        assert_eq!(sm.kind(), EstimatorKind::Smoothed);
    }

    #[test]
    fn flat_weights_bound_diagonals_by_window_max() {
        let s = white_noise(64, 1, 3);
        let ell = 3usize;
        let grid = fourier_grid(64, 10).unwrap();
        let scheme =
            WeightScheme::scalar(64, ell, vec![1.0 / (2.0 * ell as f64 + 1.0); 2 * ell + 1])
                .unwrap();
        let sm = smoothed_periodogram(&s, &grid, &scheme).unwrap();
        let full = FrequencyGrid::with_indices(64, (1..=64).collect()).unwrap();
        let raw = periodogram(&s, &full).unwrap();
        for (k, &j) in grid.indices().iter().enumerate() {
            let window_max = (-(ell as i64)..=ell as i64)
                .map(|d| {
                    let idx = (j as i64 + d).rem_euclid(64) as usize;
                    // raw holds indices 1..=64 at positions 0..=63
                    let pos = if idx == 0 { 63 } else { idx - 1 };
                    raw.matrix(pos)[[0, 0]].re
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(sm.matrix(k)[[0, 0]].re <= window_max + 1e-12);
        }
    }

    #[test]
    fn smoothed_matches_brute_force_double_loop() {
        // independent brute-force double summation over the window
        let s = white_noise(64, 2, 21);
        let grid = fourier_grid(64, 8).unwrap();
        let scheme = bartlett_weights(64, 4, true).unwrap();
        let sm = smoothed_periodogram(&s, &grid, &scheme).unwrap();
        let j = 5usize;
        let mut expect = Complex64::new(0.0, 0.0);
        for k in -4i64..=4 {
            let idx = (j as i64 + k).rem_euclid(64) as usize;
            let w = dft(&s, lambda_at(64, idx));
            expect += scheme.weight_entry(k, 0, 0) * w[0] * w[0].conj();
        }
        assert!((sm.matrix(j - 1)[[0, 0]] - expect).norm() < 1e-12);
    }

    #[test]
    fn skip_pole_drops_exactly_the_zero_ordinate() {
        let s = white_noise(32, 1, 13);
        let grid = fourier_grid(32, 4).unwrap();
        let scheme = bartlett_weights(32, 6, false).unwrap();
        let plain = smoothed_periodogram(&s, &grid, &scheme).unwrap();
        let skipped =
            smoothed_periodogram(&s, &grid, &scheme.clone().with_skip_pole(true)).unwrap();
        let w0 = dft(&s, 0.0);
        for (k, &j) in grid.indices().iter().enumerate() {
            if j <= 6 {
                let diff = plain.matrix(k)[[0, 0]] - skipped.matrix(k)[[0, 0]];
                let expect = scheme.weight_entry(-(j as i64), 0, 0) * w0[0].norm_sqr();
                assert!((diff.re - expect).abs() < 1e-12);
            } else {
                assert_eq!(plain.matrix(k), skipped.matrix(k));
            }
        }
    }

    #[test]
    fn zero_frequency_variant_is_real() {
        let s = white_noise(32, 2, 17);
        let grid = FrequencyGrid::with_indices(32, vec![0, 1, 2]).unwrap();
        let scheme = bartlett_weights(32, 3, true).unwrap();
        let sm = smoothed_periodogram(&s, &grid, &scheme).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(sm.matrix(0)[[r, c]].im, 0.0);
            }
        }
        // one-sided sum against a hand loop
        let mut expect = scheme.weight_entry(0, 0, 0) * dft(&s, lambda_at(32, 1))[0].norm_sqr();
        for k in 1..=3i64 {
            let w = dft(&s, lambda_at(32, (k + 1) as usize));
            expect += 2.0 * scheme.weight_entry(k, 0, 0) * w[0].norm_sqr();
        }
        assert!((sm.matrix(0)[[0, 0]].re - expect).abs() < 1e-12);
    }

    #[test]
    fn cosine_bell_values() {
        assert_eq!(cosine_bell(0.0).unwrap(), 0.0);
        assert!((cosine_bell(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((cosine_bell(0.25).unwrap() - 0.5).abs() < 1e-15);
        for u in [0.1, 0.37, 0.42] {
            assert!((cosine_bell(u).unwrap() - cosine_bell(1.0 - u).unwrap()).abs() < 1e-15);
        }
        assert!(cosine_bell(-0.01).is_err());
        assert!(cosine_bell(1.01).is_err());
    }

    #[test]
    fn cosine_bell_taper_energy() {
        let taper = Taper::cosine_bell();
        assert!((taper.h_sq_integral()[0] - 0.375).abs() < 1e-9);
        // discrete energy Σ L²/n -> H within 1e-3 at n=1000
        let n = 1000;
        let sum: f64 = (1..=n)
            .map(|t| cosine_bell(t as f64 / n as f64).unwrap().powi(2))
            .sum();
        assert!((sum / n as f64 - 0.375).abs() < 1e-3);
    }

    #[test]
    fn constant_taper_reproduces_raw_diagonals() {
        let s = white_noise(50, 2, 23);
        let grid = fourier_grid(50, 12).unwrap();
        let taper = Taper::shared(|_| 1.0).unwrap();
        let tp = tapered_periodogram(&s, &grid, &taper).unwrap();
        let raw = periodogram(&s, &grid).unwrap();
        for k in 0..grid.len() {
            for i in 0..2 {
                let a = tp.matrix(k)[[i, i]].re;
                let b = raw.matrix(k)[[i, i]].re;
                assert!((a - b).abs() <= 1e-12 * b.abs());
            }
        }
        assert_eq!(tp.kind(), EstimatorKind::Tapered);
    }

    #[test]
    fn tapered_is_hermitian_psd() {
        let s = white_noise(64, 2, 29);
        let grid = fourier_grid(64, 16).unwrap();
        let tp = tapered_periodogram(&s, &grid, &Taper::cosine_bell()).unwrap();
        assert!(tp.max_hermitian_deviation() < 1e-10);
        assert!(tp.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn per_component_tapers_apply_independently() {
        let s = white_noise(48, 2, 19);
        let grid = fourier_grid(48, 12).unwrap();
        let mixed = Taper::per_component(vec![
            Arc::new(|_| 1.0),
            Arc::new(|u: f64| 0.5 * (1.0 - (TAU * u.min(1.0 - u)).cos())),
        ])
        .unwrap();
        assert!((mixed.h_sq_integral()[0] - 1.0).abs() < 1e-9);
        assert!((mixed.h_sq_integral()[1] - 0.375).abs() < 1e-9);
        let tp = tapered_periodogram(&s, &grid, &mixed).unwrap();
        let raw = periodogram(&s, &grid).unwrap();
        // the flat component reproduces the raw diagonal; the tapered one differs
        let mut tapered_differs = false;
        for k in 0..grid.len() {
            let a = tp.matrix(k)[[0, 0]].re;
            let b = raw.matrix(k)[[0, 0]].re;
            assert!((a - b).abs() <= 1e-12 * b.abs());
            if (tp.matrix(k)[[1, 1]].re - raw.matrix(k)[[1, 1]].re).abs() > 1e-9 {
                tapered_differs = true;
            }
        }
        assert!(tapered_differs);
    }

    #[test]
    fn matrix_weights_replicating_a_scalar_match_the_scalar_route() {
        let s = white_noise(40, 2, 41);
        let grid = fourier_grid(40, 10).unwrap();
        let scalar = bartlett_weights(40, 3, true).unwrap();
        let mats: Vec<Array2<f64>> = (-3i64..=3)
            .map(|k| Array2::from_elem((2, 2), scalar.weight_entry(k, 0, 0)))
            .collect();
        let full = WeightScheme::matrix(40, 3, mats).unwrap();
        let a = smoothed_periodogram(&s, &grid, &scalar).unwrap();
        let b = smoothed_periodogram(&s, &grid, &full).unwrap();
        for k in 0..grid.len() {
            for r in 0..2 {
                for c in 0..2 {
                    assert!((a.matrix(k)[[r, c]] - b.matrix(k)[[r, c]]).norm() < 1e-14);
                }
            }
        }
        // dimension mismatch against a q=1 series
        let s1 = white_noise(40, 1, 42);
        let full_again = WeightScheme::matrix(
            40,
            3,
            (-3i64..=3)
                .map(|k| Array2::from_elem((2, 2), scalar.weight_entry(k, 0, 0)))
                .collect(),
        )
        .unwrap();
        assert!(smoothed_periodogram(&s1, &grid, &full_again).is_err());
    }

    #[test]
    fn degenerate_taper_is_rejected() {
        let s = white_noise(16, 1, 31);
        let grid = fourier_grid(16, 4).unwrap();
        // positive integral but zero at every sample point t/n
        let taper = Taper::shared(|u| {
            let scaled = u * 16.0;
            if (scaled - scaled.round()).abs() < 1e-9 {
                0.0
            } else {
                1.0
            }
        })
        .unwrap();
        assert!(tapered_periodogram(&s, &grid, &taper).is_err());
    }

    #[test]
    fn taper_with_zero_integral_is_rejected() {
        assert!(Taper::shared(|_| 0.0).is_err());
    }

    #[test]
    fn scheme_n_mismatch_is_an_error() {
        let s = white_noise(32, 1, 37);
        let grid = fourier_grid(32, 8).unwrap();
        let scheme = bartlett_weights(64, 4, true).unwrap();
        assert!(smoothed_periodogram(&s, &grid, &scheme).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn periodogram_stays_hermitian_psd(
                seed in 0u64..5000,
                n in 8usize..80,
                q in 1usize..3,
            ) {
                let s = white_noise(n, q, seed);
                let grid = fourier_grid(n, n / 2).unwrap();
                let p = periodogram(&s, &grid).unwrap();
                prop_assert!(p.max_hermitian_deviation() < 1e-10);
                prop_assert!(p.min_eigenvalue() >= -1e-12);
            }

            #[test]
            fn smoothing_preserves_hermitian_psd(
                seed in 0u64..5000,
                ell in 1usize..6,
                skip in proptest::bool::ANY,
            ) {
                let s = white_noise(48, 2, seed);
                let grid = fourier_grid(48, 12).unwrap();
                let scheme = bartlett_weights(48, ell, true)
                    .unwrap()
                    .with_skip_pole(skip);
                let f = smoothed_periodogram(&s, &grid, &scheme).unwrap();
                prop_assert!(f.max_hermitian_deviation() < 1e-10);
                prop_assert!(f.min_eigenvalue() >= -1e-8);
            }
        }
    }
}
