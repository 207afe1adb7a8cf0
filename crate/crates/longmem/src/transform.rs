//! Pointwise series transforms used before estimation: log-returns and the
//! squared log-returns commonly taken as a volatility proxy.

use ndarray::Array2;

use crate::error::{arg_err, Result};
use crate::series::MultiSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMode {
    /// r_t = log x_{t+1} − log x_t
    LogReturn,
    /// r_t² (squares of the first difference of the logarithm)
    SquaredLogReturn,
}

/// Apply the transform columnwise; the output has n−1 rows.
/// Every input value must be strictly positive.
pub fn transform(series: &MultiSeries, mode: TransformMode) -> Result<Array2<f64>> {
    let n = series.n();
    let q = series.q();
    if let Some(((t, i), v)) = series.values().indexed_iter().find(|(_, v)| !(**v > 0.0)) {
        return arg_err(format!(
            "log transform needs positive values; got {v} at row {t}, column {i}"
        ));
    }
    let mut out = Array2::<f64>::zeros((n - 1, q));
    for i in 0..q {
        for t in 0..n - 1 {
            let r = series.values()[[t + 1, i]].ln() - series.values()[[t, i]].ln();
            out[[t, i]] = match mode {
                TransformMode::LogReturn => r,
                TransformMode::SquaredLogReturn => r * r,
            };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn constant_series_maps_to_zeros() {
        let s = MultiSeries::new(Array2::from_elem((5, 2), 3.0)).unwrap();
        let out = transform(&s, TransformMode::SquaredLogReturn).unwrap();
        assert_eq!(out.dim(), (4, 2));
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn two_row_example() {
        let s = MultiSeries::new(array![[1.0], [std::f64::consts::E]]).unwrap();
        let lr = transform(&s, TransformMode::LogReturn).unwrap();
        assert!((lr[[0, 0]] - 1.0).abs() < 1e-15);
        let sq = transform(&s, TransformMode::SquaredLogReturn).unwrap();
        assert!((sq[[0, 0]] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn geometric_series_gives_constant_log_return() {
        let s =
            MultiSeries::new(Array2::from_shape_fn((6, 1), |(t, _)| 2f64.powi(t as i32))).unwrap();
        let lr = transform(&s, TransformMode::LogReturn).unwrap();
        let sq = transform(&s, TransformMode::SquaredLogReturn).unwrap();
        for t in 0..5 {
            assert!((lr[[t, 0]] - std::f64::consts::LN_2).abs() < 1e-15);
            assert!((sq[[t, 0]] - 0.4804530139182014).abs() < 1e-14);
        }
    }

    #[test]
    fn nonpositive_values_are_located() {
        let s = MultiSeries::new(array![[1.0, 2.0], [3.0, -1.0], [1.0, 1.0]]).unwrap();
        let err = transform(&s, TransformMode::LogReturn).unwrap_err();
        assert!(err.to_string().contains("row 1, column 1"));
    }
}
