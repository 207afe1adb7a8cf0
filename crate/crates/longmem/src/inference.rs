//! Asymptotic inference for the GSE: the limiting covariance of
//! m^{1/2}(d̂ − d₀), the bias-corrected estimator of G₀, and Wald-type
//! hypothesis tests with χ² p-values.
//!
//! The limit of Ĝ(d̂) is not G₀ itself but 𝒢₀ = Re[ℰ₀G₀ℰ̄₀'] with
//! ℰ₀ = diag(e^{iπd_k/2}), i.e. entrywise G₀ cos(π(d_r−d_s)/2); dividing by
//! the cosine factor recovers a consistent estimator of G₀.

use ndarray::{Array1, Array2};

use crate::error::{arg_err, num_err, LongmemError, Result};
use crate::linalg;
use crate::special;

/// The asymptotic covariance construction of the estimator's limit law.
///
/// `omega` is the covariance of the m^{1/2}-normalized estimation error:
///
/// ```text
/// Ω = ½ (𝒢₀⊙𝒢₀⁻¹ + I)⁻¹ Σ (𝒢₀⊙𝒢₀⁻¹ + I)⁻¹
/// Σ = 𝒢₀⊙𝒢₀⁻¹ + I + (𝒢₀⁻¹g₀𝒢₀⁻¹)⊙g₀ − (𝒢₀⁻¹g₀)⊙(𝒢₀⁻¹g₀)'
/// ```
///
/// NOTE: `𝒢₀⊙𝒢₀⁻¹` is the Hadamard (entrywise) product of 𝒢₀ with its
/// *matrix* inverse — not a matrix of entrywise reciprocals.
#[derive(Debug, Clone)]
pub struct AsymptoticCov {
    /// The G₀ estimate that generated the matrices (corrected Ĝ in the
    /// estimation pipeline).
    pub g0_hat: Array2<f64>,
    /// 𝒢₀ = Re[ℰ₀G₀ℰ̄₀'].
    pub script_g: Array2<f64>,
    /// g₀ = Im[ℰ₀G₀ℰ̄₀'].
    pub little_g: Array2<f64>,
    /// Σ of the limit law.
    pub sigma: Array2<f64>,
    /// Ω of the limit law.
    pub omega: Array2<f64>,
    /// The d vector the phases were built from.
    pub d_used: Vec<f64>,
}

/// Bias correction Ĝ_corrected = τ(d̂) ⊙ Ĝ(d̂) with
/// τ_rs = 1 / cos(π(d̂_r − d̂_s)/2); the diagonal is unchanged.
pub fn corrected_g(d_hat: &[f64], g_hat: &Array2<f64>) -> Result<Array2<f64>> {
    let q = d_hat.len();
    if g_hat.dim() != (q, q) {
        return arg_err("corrected_g: dimension mismatch between d and G");
    }
    let mut out = g_hat.clone();
    for r in 0..q {
        for s in 0..q {
            let gap = (d_hat[r] - d_hat[s]).abs();
            if gap >= 1.0 - 1e-9 {
                return num_err(format!(
                    "corrected_g: |d_{r} - d_{s}| = {gap} puts the cosine correction near its pole"
                ));
            }
            if r != s {
                let tau = 1.0 / (std::f64::consts::PI * (d_hat[r] - d_hat[s]) / 2.0).cos();
                out[[r, s]] *= tau;
            }
        }
    }
    Ok(out)
}

/// Evaluate the limit-law matrices at a given d and G₀ (or an estimate of
/// it, yielding Ω̂).
pub fn omega(d: &[f64], g0: &Array2<f64>) -> Result<AsymptoticCov> {
    let q = d.len();
    if g0.dim() != (q, q) {
        return arg_err("omega: dimension mismatch between d and G0");
    }
    let sym_dev = (0..q)
        .flat_map(|r| (0..q).map(move |s| (r, s)))
        .map(|(r, s)| (g0[[r, s]] - g0[[s, r]]).abs())
        .fold(0.0f64, f64::max);
    if sym_dev > 1e-8 {
        return arg_err(format!(
            "omega: G0 is not symmetric (deviation {sym_dev:e})"
        ));
    }

    // ℰ₀G₀ℰ̄₀' has entries G₀_rs e^{iπ(d_r−d_s)/2}; split into Re and Im
    let mut script_g = Array2::<f64>::zeros((q, q));
    let mut little_g = Array2::<f64>::zeros((q, q));
    for r in 0..q {
        for s in 0..q {
            let phase = std::f64::consts::PI * (d[r] - d[s]) / 2.0;
            script_g[[r, s]] = g0[[r, s]] * phase.cos();
            little_g[[r, s]] = g0[[r, s]] * phase.sin();
        }
    }

    let inv = linalg::spd_inverse(&script_g)
        .map_err(|e| LongmemError::Numerical(format!("omega: 𝒢₀ not invertible: {e}")))?;

    let hadamard = &script_g * &inv; // entrywise
    let eye = Array2::<f64>::eye(q);
    let inv_g = inv.dot(&little_g); // 𝒢₀⁻¹ g₀
    let inv_g_t = inv_g.t().to_owned();
    let mut sigma = &hadamard + &eye;
    sigma = sigma + &inv_g.dot(&inv) * &little_g;
    sigma = sigma - &inv_g * &inv_g_t;
    let bracket = &hadamard + &eye;
    let bracket_inv = linalg::spd_inverse(&bracket)
        .map_err(|e| LongmemError::Numerical(format!("omega: 𝒢₀⊙𝒢₀⁻¹+I not invertible: {e}")))?;
    let mut omega = bracket_inv.dot(&sigma).dot(&bracket_inv).mapv(|v| 0.5 * v);
    // symmetric in exact arithmetic; remove roundoff skew
    for r in 0..q {
        for s in 0..r {
            let v = 0.5 * (omega[[r, s]] + omega[[s, r]]);
            omega[[r, s]] = v;
            omega[[s, r]] = v;
        }
    }
    Ok(AsymptoticCov {
        g0_hat: g0.clone(),
        script_g,
        little_g,
        sigma,
        omega,
        d_used: d.to_vec(),
    })
}

/// A Wald test of H₀: R d = ν.
#[derive(Debug, Clone)]
pub struct WaldTest {
    pub r: Array2<f64>,
    pub nu: Array1<f64>,
    /// T = m (Rd̂−ν)' (RΩ̂R')⁻¹ (Rd̂−ν), asymptotically χ²_s under H₀.
    pub t: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Restriction matrix for equality of all components:
/// R = (I_{q−1} ⋮ 0) − (0 ⋮ I_{q−1}), ν = 0.
pub fn common_d_restriction(q: usize) -> Array2<f64> {
    let mut r = Array2::<f64>::zeros((q - 1, q));
    for i in 0..q - 1 {
        r[[i, i]] = 1.0;
        r[[i, i + 1]] = -1.0;
    }
    r
}

/// Restriction matrix for the I(0) test: R = I_q, ν = 0.
pub fn i0_restriction(q: usize) -> Array2<f64> {
    Array2::<f64>::eye(q)
}

/// Wald test statistic and χ² p-value.
///
/// Ω̂ eigenvalues in (−1e-9, 0) are floored to zero before use (finite-sample
/// roundoff); anything more negative is an error.
pub fn wald_test(
    r: &Array2<f64>,
    nu: &Array1<f64>,
    d_hat: &[f64],
    omega_hat: &Array2<f64>,
    m: usize,
) -> Result<WaldTest> {
    let q = d_hat.len();
    let s = r.nrows();
    if s < 1 || s > q || r.ncols() != q {
        return arg_err(format!("wald_test: R must be s×q with 1 ≤ s ≤ {q}"));
    }
    if nu.len() != s {
        return arg_err("wald_test: ν length must match the rows of R");
    }
    if omega_hat.dim() != (q, q) {
        return arg_err("wald_test: Ω̂ must be q×q");
    }
    let scale = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if linalg::matrix_rank(r, 1e-10 * scale.max(1.0)) < s {
        return arg_err("wald_test: test construction failed, R is rank deficient");
    }
    let omega = psd_floor(omega_hat)?;

    let sandwich = r.dot(&omega).dot(&r.t());
    let mut diff = Array1::<f64>::zeros(s);
    for i in 0..s {
        let mut acc = -nu[i];
        for j in 0..q {
            acc += r[[i, j]] * d_hat[j];
        }
        diff[i] = acc;
    }
    let solved = linalg::spd_solve(&sandwich, &diff).map_err(|_| {
        LongmemError::Numerical("wald_test: test construction failed, RΩ̂R' is singular".into())
    })?;
    let t = (m as f64) * diff.dot(&solved);
    let t = if t < 0.0 && t > -1e-12 { 0.0 } else { t };
    if t < 0.0 {
        return num_err(format!("wald_test: negative quadratic form {t}"));
    }
    Ok(WaldTest {
        r: r.clone(),
        nu: nu.clone(),
        t,
        dof: s,
        p_value: chi2_sf(t, s as u32),
    })
}

/// Floor small negative eigenvalues (roundoff) of a symmetric matrix to 0.
fn psd_floor(a: &Array2<f64>) -> Result<Array2<f64>> {
    let (vals, vecs) = linalg::symmetric_eigen(a);
    let min = vals[0];
    if min >= 0.0 {
        return Ok(a.clone());
    }
    if min <= -1e-9 {
        return num_err(format!(
            "matrix has eigenvalue {min:e} below the -1e-9 floor"
        ));
    }
    let q = a.nrows();
    let mut out = Array2::<f64>::zeros((q, q));
    for k in 0..q {
        let lambda = vals[k].max(0.0);
        for i in 0..q {
            for j in 0..q {
                out[[i, j]] += lambda * vecs[[i, k]] * vecs[[j, k]];
            }
        }
    }
    Ok(out)
}

/// Upper tail of the χ²_s distribution via the regularized upper incomplete
/// gamma function Q(s/2, x/2).
pub fn chi2_sf(x: f64, s: u32) -> f64 {
    assert!(s >= 1, "chi2_sf: dof must be at least 1");
    assert!(
        x >= 0.0 && x.is_finite(),
        "chi2_sf: x must be finite and nonnegative"
    );
    special::gamma_q(s as f64 / 2.0, x / 2.0)
}
