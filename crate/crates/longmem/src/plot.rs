//! Plot-data emission for Monte Carlo estimate clouds: histogram with
//! Freedman–Diaconis bins, Gaussian-kernel density with the Silverman
//! bandwidth, and pairwise scatter coordinates.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{arg_err, Result};

#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    /// Bin edges, one more than counts.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Density {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub bandwidth: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentPlot {
    pub component: usize,
    pub histogram: Histogram,
    pub density: Density,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScatterPair {
    pub component_x: usize,
    pub component_y: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlotData {
    pub rows: usize,
    pub components: Vec<ComponentPlot>,
    pub scatter: Vec<ScatterPair>,
}

const DENSITY_GRID: usize = 201;

/// Build plot data from an R×q matrix of estimates (R ≥ 10 rows).
pub fn plot_data(estimates: &Array2<f64>) -> Result<PlotData> {
    let (rows, q) = estimates.dim();
    if rows < 10 {
        return arg_err(format!(
            "plot data needs at least 10 estimate rows, got {rows}"
        ));
    }
    let mut components = Vec::with_capacity(q);
    for c in 0..q {
        let values: Vec<f64> = estimates.column(c).to_vec();
        components.push(ComponentPlot {
            component: c,
            histogram: histogram_fd(&values),
            density: kernel_density(&values),
        });
    }
    let mut scatter = Vec::new();
    for a in 0..q {
        for b in a + 1..q {
            scatter.push(ScatterPair {
                component_x: a,
                component_y: b,
                x: estimates.column(a).to_vec(),
                y: estimates.column(b).to_vec(),
            });
        }
    }
    Ok(PlotData {
        rows,
        components,
        scatter,
    })
}

/// Type-7 (linear interpolation) quantile of already-sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

/// Freedman–Diaconis histogram: bin width 2·IQR·R^{-1/3}; degenerate
/// spreads collapse to a single unit-width bin.
fn histogram_fd(values: &[f64]) -> Histogram {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let width = 2.0 * iqr / (values.len() as f64).cbrt();
    if width <= 0.0 || max == min {
        return Histogram {
            edges: vec![min - 0.5, max + 0.5],
            counts: vec![values.len()],
        };
    }
    let bins = (((max - min) / width).ceil() as usize).max(1);
    let step = (max - min) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| min + k as f64 * step).collect();
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = (((v - min) / step) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Histogram { edges, counts }
}

/// Gaussian kernel density on a 201-point grid with the Silverman
/// bandwidth 1.06·σ̂·R^{-1/5}. A zero-variance sample falls back to a
/// narrow bandwidth, i.e. a spike at the common value.
fn kernel_density(values: &[f64]) -> Density {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1.0);
    let sigma = var.sqrt();
    let h = if sigma > 0.0 {
        1.06 * sigma * r.powf(-0.2)
    } else {
        mean.abs().max(1.0) * 1e-6
    };
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min) - 3.0 * h;
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 3.0 * h;
    let step = (max - min) / (DENSITY_GRID - 1) as f64;
    let norm = 1.0 / (r * h * (std::f64::consts::TAU).sqrt());
    let x: Vec<f64> = (0..DENSITY_GRID).map(|k| min + k as f64 * step).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|&g| {
            norm * values
                .iter()
                .map(|&v| (-0.5 * ((g - v) / h).powi(2)).exp())
                .sum::<f64>()
        })
        .collect();
    Density { x, y, bandwidth: h }
}
