//! End-to-end checks of the pluggable-estimator surface: feed the local
//! spectral model itself in as f_n and recover d.

use ndarray::{array, Array2};

use longmem::gse::{self, fit_spectral, model_spectrum, ParamSpace};
use longmem::optim::NelderMeadOptions;
use longmem::spectral::{fourier_grid, EstimatorKind, SpectralEstimate};

fn model_estimate(d: &[f64], g: &Array2<f64>, n: usize, m: usize) -> SpectralEstimate {
    let grid = fourier_grid(n, m).unwrap();
    let matrices = grid
        .lambdas()
        .iter()
        .map(|&lam| model_spectrum(d, g, lam).unwrap())
        .collect();
    SpectralEstimate::from_parts(grid, matrices, EstimatorKind::Raw).unwrap()
}

#[test]
fn scalar_model_spectrum_is_recovered_exactly() {
    // for q = 1 the phase cancels, so d is the exact stationary point
    for &d0 in &[-0.3, 0.0, 0.25, 0.45] {
        let est = model_estimate(&[d0], &Array2::from_elem((1, 1), 2.0), 1024, 128);
        let fit = fit_spectral(
            &est,
            128,
            &ParamSpace::symmetric(1),
            &NelderMeadOptions::default(),
        )
        .unwrap();
        assert!(
            (fit.d_hat[0] - d0).abs() < 1e-6,
            "d0={d0}: recovered {}",
            fit.d_hat[0]
        );
        assert!(fit.converged);
    }
}

#[test]
fn bivariate_model_spectrum_is_recovered_closely() {
    // distinct d components leave a small phase-induced finite-m offset
    let d0 = [0.2, 0.35];
    let g = array![[1.0, 0.5], [0.5, 1.0]];
    let est = model_estimate(&d0, &g, 4096, 256);
    let fit = fit_spectral(
        &est,
        256,
        &ParamSpace::symmetric(2),
        &NelderMeadOptions::default(),
    )
    .unwrap();
    for (a, b) in fit.d_hat.iter().zip(&d0) {
        assert!((a - b).abs() < 0.01, "recovered {:?}", fit.d_hat);
    }
    // and the recovered scale matrix tracks G up to the cosine bias
    let ratio = fit.g_hat[[0, 0]] / g[[0, 0]];
    assert!((ratio - 1.0).abs() < 0.05, "G ratio {ratio}");
}

#[test]
fn four_dimensional_fit_uses_the_cycled_start_grid() {
    // q > 3 switches the multi-start to the 125-point cycled selection
    let spec =
        longmem::varfima::VarfimaSpec::equicorrelated(vec![0.0, 0.0, 0.0, 0.0], 0.4, 300, 61, 512)
            .unwrap();
    let series = longmem::varfima::simulate(&spec).unwrap();
    let fit = gse::estimate(
        &series,
        &gse::EstimateConfig::new(gse::EstimatorConfig::Raw, 128),
    )
    .unwrap();
    assert!(fit.converged);
    assert_eq!(fit.d_hat.len(), 4);
    assert_eq!(fit.starts, 126);
    for &d in &fit.d_hat {
        assert!(d.abs() < 0.2, "white-noise d̂ {d}");
    }
    // the equal-d inference path holds together at q = 4
    let g_corr = longmem::inference::corrected_g(&fit.d_hat, &fit.g_hat).unwrap();
    let cov = longmem::inference::omega(&fit.d_hat, &g_corr).unwrap();
    let r = longmem::inference::common_d_restriction(4);
    let nu = ndarray::Array1::zeros(3);
    let test = longmem::inference::wald_test(&r, &nu, &fit.d_hat, &cov.omega, 128).unwrap();
    assert_eq!(test.dof, 3);
    assert!(test.t >= 0.0 && test.p_value <= 1.0);
}

#[test]
fn objective_and_score_accept_external_estimates() {
    let d0 = [0.1];
    let est = model_estimate(&d0, &Array2::from_elem((1, 1), 1.0), 512, 64);
    let s = gse::objective(&[0.1], &est, 64).unwrap();
    assert!(s.is_finite());
    // score is ~0 at the generating d
    let sc = gse::score(&[0.1], &est, 64).unwrap();
    assert!(sc[0].abs() < 1e-10, "score {}", sc[0]);
}
