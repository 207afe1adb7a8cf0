//! Nelder–Mead simplex minimization with box constraints handled by
//! clamping candidate points into the box.

/// Stopping rules for a single Nelder–Mead run.
#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Simplex diameter (max ∞-distance to the best vertex) below which the
    /// run counts as converged.
    pub simplex_tol: f64,
    /// Objective spread (worst − best) below which the run also stops.
    pub objective_tol: f64,
    /// Iteration cap; 0 means 500 per dimension.
    pub max_iters: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            simplex_tol: 1e-7,
            objective_tol: 1e-10,
            max_iters: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NmOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evals: usize,
    pub converged: bool,
}

fn clamp(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lower[i], upper[i]);
    }
}

fn diameter(simplex: &[Vec<f64>], best: usize) -> f64 {
    let mut d: f64 = 0.0;
    for v in simplex {
        for (a, b) in v.iter().zip(&simplex[best]) {
            d = d.max((a - b).abs());
        }
    }
    d
}

/// Minimize `f` over the box `[lower, upper]`, starting from `start`.
///
/// Non-finite objective values are treated as infeasible (+∞); the standard
/// reflection/expansion/contraction/shrink moves handle them by ordering.
pub fn nelder_mead_box<F>(
    mut f: F,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &NelderMeadOptions,
) -> NmOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    let max_iters = if opts.max_iters == 0 {
        500 * dim
    } else {
        opts.max_iters
    };
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let eval = |f: &mut F, x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // initial simplex: start plus one step along each coordinate, kept in the box
    let mut x0 = start.to_vec();
    clamp(&mut x0, lower, upper);
    let mut simplex = vec![x0.clone()];
    for i in 0..dim {
        let width = upper[i] - lower[i];
        let step = 0.1 * width;
        let mut v = x0.clone();
        if v[i] + step <= upper[i] {
            v[i] += step;
        } else {
            v[i] -= step;
        }
        simplex.push(v);
    }
    let mut evals = 0usize;
    let mut values: Vec<f64> = simplex
        .iter()
        .map(|v| {
            evals += 1;
            eval(&mut f, v)
        })
        .collect();

    let mut iterations = 0usize;
    while iterations < max_iters {
        // order: best first
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        let spread = values[worst] - values[best];
        let diam = diameter(&simplex, best);
        if diam < opts.simplex_tol && (spread < opts.objective_tol || !spread.is_finite()) {
            break;
        }
        if !values[best].is_finite() {
            // the whole simplex is infeasible; nothing to improve
            break;
        }
        iterations += 1;

        // centroid of all but the worst vertex
        let mut centroid = vec![0.0; dim];
        for (k, v) in simplex.iter().enumerate() {
            if k == worst {
                continue;
            }
            for i in 0..dim {
                centroid[i] += v[i];
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let mut reflected = vec![0.0; dim];
        for i in 0..dim {
            reflected[i] = centroid[i] + alpha * (centroid[i] - simplex[worst][i]);
        }
        clamp(&mut reflected, lower, upper);
        evals += 1;
        let f_reflected = eval(&mut f, &reflected);

        if f_reflected < values[best] {
            // try to expand
            let mut expanded = vec![0.0; dim];
            for i in 0..dim {
                expanded[i] = centroid[i] + gamma * (reflected[i] - centroid[i]);
            }
            clamp(&mut expanded, lower, upper);
            evals += 1;
            let f_expanded = eval(&mut f, &expanded);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if f_reflected < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            // contract toward the better of worst/reflected
            let (anchor, f_anchor) = if f_reflected < values[worst] {
                (reflected.clone(), f_reflected)
            } else {
                (simplex[worst].clone(), values[worst])
            };
            let mut contracted = vec![0.0; dim];
            for i in 0..dim {
                contracted[i] = centroid[i] + rho * (anchor[i] - centroid[i]);
            }
            clamp(&mut contracted, lower, upper);
            evals += 1;
            let f_contracted = eval(&mut f, &contracted);
            if f_contracted < f_anchor {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                // shrink toward the best vertex
                let best_point = simplex[best].clone();
                for (k, v) in simplex.iter_mut().enumerate() {
                    if k == best {
                        continue;
                    }
                    for i in 0..dim {
                        v[i] = best_point[i] + sigma * (v[i] - best_point[i]);
                    }
                    clamp(v, lower, upper);
                    evals += 1;
                    values[k] = eval(&mut f, v);
                }
            }
        }
    }

    let mut best = 0;
    for k in 1..=dim {
        if values[k] < values[best] {
            best = k;
        }
    }
    let diam = diameter(&simplex, best);
    NmOutcome {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        evals,
        converged: diam < opts.simplex_tol,
    }
}
