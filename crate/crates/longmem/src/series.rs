//! Observation container for a multivariate time series.

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{arg_err, Result};

/// An n×q matrix of real observations: row t is the q-dimensional
/// observation at time t (t = 1..n in the frequency-domain formulas).
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSeries {
    values: Array2<f64>,
}

impl MultiSeries {
    /// Wrap an n×q matrix. Requires n ≥ 2, q ≥ 1 and all entries finite.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (n, q) = values.dim();
        if n < 2 {
            return arg_err(format!("series needs at least 2 observations, got {n}"));
        }
        if q < 1 {
            return arg_err("series needs at least one component");
        }
        if let Some(((t, i), v)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return arg_err(format!("non-finite value {v} at row {t}, column {i}"));
        }
        Ok(Self { values })
    }

    /// Build from per-component columns of equal length.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        if columns.is_empty() {
            return arg_err("no columns");
        }
        let n = columns[0].len();
        if columns.iter().any(|c| c.len() != n) {
            return arg_err("columns have unequal lengths");
        }
        let mut values = Array2::<f64>::zeros((n, columns.len()));
        for (i, col) in columns.iter().enumerate() {
            for (t, &v) in col.iter().enumerate() {
                values[[t, i]] = v;
            }
        }
        Self::new(values)
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn q(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn column(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.column(i)
    }

    /// Per-component sample means.
    pub fn means(&self) -> Vec<f64> {
        let n = self.n() as f64;
        (0..self.q()).map(|i| self.column(i).sum() / n).collect()
    }

    /// Copy with the sample mean of each component subtracted.
    pub fn centered(&self) -> Self {
        let means = self.means();
        let mut values = self.values.clone();
        for ((_, i), v) in values.indexed_iter_mut() {
            *v -= means[i];
        }
        Self { values }
    }

    /// Copy scaled by a constant.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.mapv(|v| c * v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(MultiSeries::new(Array2::zeros((1, 2))).is_err());
        assert!(MultiSeries::new(Array2::zeros((5, 0))).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let err = MultiSeries::new(array![[0.0, 1.0], [f64::NAN, 2.0]]).unwrap_err();
        assert!(err.to_string().contains("row 1"));
    }

    #[test]
    fn centering_zeroes_the_means() {
        let s = MultiSeries::new(array![[1.0, 10.0], [2.0, 20.0], [3.0, 60.0]]).unwrap();
        let c = s.centered();
        for m in c.means() {
            assert!(m.abs() < 1e-12);
        }
        assert_eq!(c.values()[[0, 1]], -20.0);
    }
}
