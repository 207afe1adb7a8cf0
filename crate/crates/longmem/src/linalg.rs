//! Small dense linear algebra for the q×q matrices used throughout the crate.
//!
//! q is the process dimension (2 in the simulation study, 4 in typical
//! applications), so everything here is written for small matrices:
//! unblocked Cholesky with a fixed elimination order and a cyclic Jacobi
//! eigensolver. No external LAPACK backend.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{num_err, Result};

/// Lower Cholesky factor of a symmetric positive definite matrix.
///
/// Fixed elimination order (row by row), so the factor is bit-reproducible.
pub fn cholesky_lower(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return num_err("cholesky: matrix not square");
    }
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return num_err(format!("cholesky: pivot {s:e} at index {i} not positive"));
                }
                l[[i, j]] = s.sqrt();
            } else {
                l[[i, j]] = s / l[[j, j]];
            }
        }
    }
    Ok(l)
}

/// log det of a symmetric positive definite matrix, `None` when the
/// Cholesky factorization fails (not positive definite).
pub fn spd_log_det(a: &Array2<f64>) -> Option<f64> {
    let l = cholesky_lower(a).ok()?;
    Some(2.0 * (0..a.nrows()).map(|i| l[[i, i]].ln()).sum::<f64>())
}

/// Inverse of a symmetric positive definite matrix via its Cholesky factor.
pub fn spd_inverse(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    let l = cholesky_lower(a)?;
    let mut inv = Array2::<f64>::zeros((n, n));
    for col in 0..n {
        let mut e = Array1::<f64>::zeros(n);
        e[col] = 1.0;
        let x = solve_with_factor(&l, &e);
        for row in 0..n {
            inv[[row, col]] = x[row];
        }
    }
    // the result is symmetric in exact arithmetic; enforce it
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (inv[[i, j]] + inv[[j, i]]);
            inv[[i, j]] = v;
            inv[[j, i]] = v;
        }
    }
    Ok(inv)
}

/// Solve `a x = b` for symmetric positive definite `a`.
pub fn spd_solve(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let l = cholesky_lower(a)?;
    Ok(solve_with_factor(&l, b))
}

fn solve_with_factor(l: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let n = l.nrows();
    // forward: L y = b
    let mut y = Array1::<f64>::zeros(n);
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[[i, k]] * y[k];
        }
        y[i] = s / l[[i, i]];
    }
    // backward: L' x = y
    let mut x = Array1::<f64>::zeros(n);
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[[k, i]] * x[k];
        }
        x[i] = s / l[[i, i]];
    }
    x
}

/// Eigenvalues and eigenvectors of a real symmetric matrix by cyclic Jacobi
/// rotations. Returns `(eigenvalues, eigenvectors)` with eigenvalues in
/// ascending order and eigenvectors in the corresponding columns.
pub fn symmetric_eigen(a: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = Array2::<f64>::eye(n);
    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[[i, j]] * m[[i, j]];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frobenius(&m)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[[p, p]];
                let aqq = m[[q, q]];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).unwrap());
    let vals = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut vecs = Array2::<f64>::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vecs[[k, new]] = v[[k, old]];
        }
    }
    (vals, vecs)
}

fn frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Eigenvalues of a complex Hermitian matrix through the standard 2q×2q
/// real symmetric embedding `[[Re, -Im], [Im, Re]]` (each eigenvalue of the
/// Hermitian matrix appears twice in the embedding).
pub fn hermitian_eigenvalues(h: &Array2<Complex64>) -> Array1<f64> {
    let q = h.nrows();
    let mut emb = Array2::<f64>::zeros((2 * q, 2 * q));
    for i in 0..q {
        for j in 0..q {
            emb[[i, j]] = h[[i, j]].re;
            emb[[i + q, j + q]] = h[[i, j]].re;
            emb[[i, j + q]] = -h[[i, j]].im;
            emb[[i + q, j]] = h[[i, j]].im;
        }
    }
    let (vals, _) = symmetric_eigen(&emb);
    // every eigenvalue is doubled; take every other one of the sorted list
    Array1::from_iter((0..q).map(|i| vals[2 * i]))
}

/// Largest entrywise deviation of `h` from its conjugate transpose.
pub fn max_hermitian_deviation(h: &Array2<Complex64>) -> f64 {
    let q = h.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..q {
        for j in 0..q {
            dev = dev.max((h[[i, j]] - h[[j, i]].conj()).norm());
        }
    }
    dev
}

/// Numerical row rank of a rectangular matrix via Gaussian elimination with
/// partial pivoting.
pub fn matrix_rank(a: &Array2<f64>, tol: f64) -> usize {
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut m = a.clone();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let mut pivot = row;
        for r in row + 1..rows {
            if m[[r, col]].abs() > m[[pivot, col]].abs() {
                pivot = r;
            }
        }
        if m[[pivot, col]].abs() <= tol {
            continue;
        }
        if pivot != row {
            for c in 0..cols {
                m.swap([row, c], [pivot, c]);
            }
        }
        for r in row + 1..rows {
            let f = m[[r, col]] / m[[row, col]];
            for c in col..cols {
                m[[r, c]] -= f * m[[row, c]];
            }
        }
        row += 1;
        rank += 1;
    }
    rank
}
