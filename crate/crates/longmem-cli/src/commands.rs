//! Implementations of the CLI commands on top of the library.

use ndarray::{Array1, Array2};
use serde_json::json;

use longmem::gse::{self, bandwidth_m, EstimateConfig, EstimatorConfig, ParamSpace};
use longmem::inference::{common_d_restriction, corrected_g, i0_restriction, omega, wald_test};
use longmem::montecarlo::{run as mc_run, EstimatorSpec, McDesign, McTable};
use longmem::plot::plot_data;
use longmem::spectral::EstimatorKind;
use longmem::transform::{transform, TransformMode};
use longmem::varfima::{simulate, VarfimaSpec};
use longmem::MultiSeries;

use crate::args;
use crate::config::{resolve, resolve_opt, resolve_switch, ConfigFile, ResolvedConfig};
use crate::io;
use crate::CliError;

pub fn parse_f64_list(raw: &str, what: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::input(format!("{what}: `{tok}` is not a number")))
        })
        .collect()
}

fn parse_estimator_kind(raw: &str) -> Result<EstimatorKind, CliError> {
    match raw.trim() {
        "raw" => Ok(EstimatorKind::Raw),
        "smoothed" => Ok(EstimatorKind::Smoothed),
        "tapered" => Ok(EstimatorKind::Tapered),
        other => Err(CliError::input(format!(
            "unknown estimator `{other}` (expected raw, smoothed or tapered)"
        ))),
    }
}

fn validate_taper_name(raw: &str) -> Result<(), CliError> {
    if raw == "cosine-bell" {
        Ok(())
    } else {
        Err(CliError::input(format!(
            "unknown taper `{raw}` (only cosine-bell is built in)"
        )))
    }
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

pub fn cmd_estimate(args: args::EstimateArgs) -> Result<(), CliError> {
    let config = ConfigFile::load(args.config.as_deref())?;
    let mut echo = ResolvedConfig::default();
    echo.put("command", "estimate");

    let input = args
        .input
        .or_else(|| config.get("input").map(std::path::PathBuf::from))
        .ok_or_else(|| CliError::input("estimate: --input is required"))?;
    echo.put("input", input.display());

    let estimator_raw = resolve(args.estimator, &config, "estimator", "raw".to_string())?;
    let kind = parse_estimator_kind(&estimator_raw)?;
    let alpha = resolve(args.alpha, &config, "alpha", 0.85)?;
    let center = !resolve_switch(args.no_center, &config, "no_center", false)?;

    let series = io::read_series(&input)?;
    let n = series.n();
    let q = series.q();

    let m = match resolve_opt(args.m, &config, "m")? {
        Some(m) => m,
        None => bandwidth_m(n, alpha),
    };
    if 2 * m >= n {
        return Err(CliError::input(format!(
            "estimate: need n > 2m, got n={n}, m={m}"
        )));
    }

    echo.put("estimator", kind);
    echo.put("alpha", alpha);
    echo.put("m", m);
    echo.put("center", center);

    let estimator = match kind {
        EstimatorKind::Raw => EstimatorConfig::Raw,
        EstimatorKind::Smoothed => {
            let beta = resolve(args.beta, &config, "beta", 0.9)?;
            let ell = match resolve_opt(args.ell, &config, "ell")? {
                Some(e) => e,
                None => bandwidth_m(n, beta),
            };
            let skip_pole = resolve_switch(args.skip_pole, &config, "skip_pole", false)?;
            echo.put("beta", beta);
            echo.put("ell", ell);
            echo.put("skip_pole", skip_pole);
            EstimatorConfig::Smoothed {
                ell,
                normalize: true,
                skip_pole,
            }
        }
        EstimatorKind::Tapered => {
            let taper = resolve(args.taper, &config, "taper", "cosine-bell".to_string())?;
            validate_taper_name(&taper)?;
            echo.put("taper", taper);
            EstimatorConfig::cosine_bell_tapered()
        }
    };

    let theta_min = resolve_opt(args.theta_min, &config, "theta_min")?;
    let theta_max = resolve_opt(args.theta_max, &config, "theta_max")?;
    let space = match (theta_min, theta_max) {
        (None, None) => None,
        (Some(lo), Some(hi)) => {
            let lo = parse_f64_list(&lo, "theta-min")?;
            let hi = parse_f64_list(&hi, "theta-max")?;
            echo.put(
                "theta_min",
                lo.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            echo.put(
                "theta_max",
                hi.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            Some(ParamSpace::new(lo, hi)?)
        }
        _ => {
            return Err(CliError::input(
                "estimate: --theta-min and --theta-max must be given together",
            ))
        }
    };

    let mut fit_config = EstimateConfig::new(estimator, m);
    fit_config.space = space;
    fit_config.center = center;

    let fit = gse::estimate(&series, &fit_config)?;
    let g_corrected = corrected_g(&fit.d_hat, &fit.g_hat)?;
    let cov = omega(&fit.d_hat, &g_corrected)?;
    let std_errors: Vec<f64> = (0..q)
        .map(|k| (cov.omega[[k, k]] / m as f64).sqrt())
        .collect();

    let report = json!({
        "schema": "longmem/1",
        "config": echo.to_json(),
        "n": n,
        "q": q,
        "m": m,
        "estimator": kind.to_string(),
        "d_hat": fit.d_hat,
        "objective": fit.objective,
        "converged": fit.converged,
        "at_boundary": fit.at_boundary,
        "iterations": fit.iterations,
        "g_hat": io::matrix_to_json(&fit.g_hat),
        "g_corrected": io::matrix_to_json(&g_corrected),
        "omega": io::matrix_to_json(&cov.omega),
        "std_errors": std_errors,
    });
    let mut out = io::open_output(args.output.as_ref())?;
    io::write_json(out.as_mut(), &report)
}

// ---------------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------------

pub fn cmd_transform(args: args::TransformArgs) -> Result<(), CliError> {
    let config = ConfigFile::load(args.config.as_deref())?;
    let mut echo = ResolvedConfig::default();
    echo.put("command", "transform");
    let input = args
        .input
        .or_else(|| config.get("input").map(std::path::PathBuf::from))
        .ok_or_else(|| CliError::input("transform: --input is required"))?;
    echo.put("input", input.display());
    let mode_raw = resolve(args.mode, &config, "mode", "log-return".to_string())?;
    let mode = match mode_raw.as_str() {
        "log-return" => TransformMode::LogReturn,
        "squared-log-return" => TransformMode::SquaredLogReturn,
        other => {
            return Err(CliError::input(format!(
                "transform: unknown mode `{other}` (log-return or squared-log-return)"
            )))
        }
    };
    echo.put("mode", mode_raw);

    let (headers, matrix) = io::read_matrix(&input)?;
    let series = MultiSeries::new(matrix)?;
    let transformed = transform(&series, mode)?;
    let mut out = io::open_output(args.output.as_ref())?;
    io::write_matrix_csv(out.as_mut(), &echo, &headers, &transformed)
}

// ---------------------------------------------------------------------------
// test
// ---------------------------------------------------------------------------

fn parse_matrix_literal(raw: &str, q: usize) -> Result<Array2<f64>, CliError> {
    let rows: Vec<Vec<f64>> = raw
        .split(';')
        .map(|row| parse_f64_list(row, "R"))
        .collect::<Result<_, _>>()?;
    let s = rows.len();
    if rows.iter().any(|r| r.len() != q) {
        return Err(CliError::input(format!(
            "R: every row must have q={q} entries"
        )));
    }
    let mut m = Array2::<f64>::zeros((s, q));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[[i, j]] = v;
        }
    }
    Ok(m)
}

pub fn cmd_test(args: args::TestArgs) -> Result<(), CliError> {
    let config = ConfigFile::load(args.config.as_deref())?;
    let mut echo = ResolvedConfig::default();
    echo.put("command", "test");
    let fit_path = args
        .fit
        .or_else(|| config.get("fit").map(std::path::PathBuf::from))
        .ok_or_else(|| CliError::input("test: --fit is required"))?;
    echo.put("fit", fit_path.display());

    let report = io::read_fit_report(&fit_path)?;
    let q = report.d_hat.len();
    let omega_hat = {
        if report.omega.len() != q || report.omega.iter().any(|r| r.len() != q) {
            return Err(CliError::input("test: omega in the fit report is not q×q"));
        }
        let mut m = Array2::<f64>::zeros((q, q));
        for (i, row) in report.omega.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[[i, j]] = v;
            }
        }
        m
    };

    let common_d = resolve_switch(args.common_d, &config, "common_d", false)?;
    let i0 = resolve_switch(args.i0, &config, "i0", false)?;
    let r_literal = resolve_opt(args.r_matrix, &config, "R")?;
    let nu_literal = resolve_opt(args.nu, &config, "nu")?;

    let (r, nu, label) = match (common_d, i0, r_literal) {
        (true, false, None) => {
            if q < 2 {
                return Err(CliError::input("test: --common-d needs q >= 2"));
            }
            let r = common_d_restriction(q);
            let nu = Array1::zeros(q - 1);
            (r, nu, "common-d".to_string())
        }
        (false, true, None) => (i0_restriction(q), Array1::zeros(q), "i0".to_string()),
        (false, false, Some(literal)) => {
            let r = parse_matrix_literal(&literal, q)?;
            let nu = match nu_literal {
                Some(nv) => Array1::from(parse_f64_list(&nv, "nu")?),
                None => Array1::zeros(r.nrows()),
            };
            echo.put("R", literal);
            (r, nu, "custom".to_string())
        }
        (false, false, None) => {
            return Err(CliError::input(
                "test: choose one of --common-d, --i0 or --R/--nu",
            ))
        }
        _ => {
            return Err(CliError::input(
                "test: --common-d, --i0 and --R are mutually exclusive",
            ))
        }
    };
    echo.put("design", &label);
    echo.put(
        "nu",
        nu.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );

    let test = wald_test(&r, &nu, &report.d_hat, &omega_hat, report.m)?;
    let out_json = json!({
        "schema": "longmem/1",
        "config": echo.to_json(),
        "design": label,
        "R": io::matrix_to_json(&test.r),
        "nu": test.nu.to_vec(),
        "T": test.t,
        "dof": test.dof,
        "p_value": test.p_value,
        "d_hat": report.d_hat,
        "m": report.m,
    });
    let mut out = io::open_output(args.output.as_ref())?;
    io::write_json(out.as_mut(), &out_json)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

pub fn cmd_simulate(args: args::SimulateArgs) -> Result<(), CliError> {
    let config = ConfigFile::load(args.config.as_deref())?;
    let mut echo = ResolvedConfig::default();
    echo.put("command", "simulate");

    let d_raw = resolve_opt(args.d, &config, "d")?
        .ok_or_else(|| CliError::input("simulate: --d is required"))?;
    let d = parse_f64_list(&d_raw, "d")?;
    let rho = resolve(args.rho, &config, "rho", 0.0)?;
    let n = resolve_opt(args.n, &config, "n")?
        .ok_or_else(|| CliError::input("simulate: --n is required"))?;
    let seed = resolve(args.seed, &config, "seed", 0u64)?;
    let truncation = resolve(args.truncation, &config, "truncation", 50_000usize)?;

    echo.put("d", &d_raw);
    echo.put("rho", rho);
    echo.put("n", n);
    echo.put("seed", seed);
    echo.put("truncation", truncation);

    let spec = VarfimaSpec::equicorrelated(d.clone(), rho, truncation, seed, n)?;
    let series = simulate(&spec)?;
    let headers: Vec<String> = (1..=d.len()).map(|i| format!("x{i}")).collect();
    let mut out = io::open_output(args.output.as_ref())?;
    io::write_matrix_csv(out.as_mut(), &echo, &headers, &series.values().to_owned())
}

// ---------------------------------------------------------------------------
// montecarlo
// ---------------------------------------------------------------------------

fn mc_table_csv(
    out: &mut dyn std::io::Write,
    echo: &ResolvedConfig,
    table: &McTable,
) -> Result<(), CliError> {
    out.write_all(echo.csv_header().as_bytes())?;
    writeln!(
        out,
        "estimator,alpha,beta,skip_pole,component,mean,st_d,mse,failures"
    )?;
    for row in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.estimator,
            row.alpha,
            row.beta.map(|b| b.to_string()).unwrap_or_default(),
            row.skip_pole,
            row.component + 1,
            io::fmt_f64(row.mean),
            io::fmt_f64(row.st_d),
            io::fmt_f64(row.mse),
            row.failures,
        )?;
    }
    Ok(())
}

pub fn cmd_montecarlo(args: args::MontecarloArgs) -> Result<(), CliError> {
    let config = ConfigFile::load(args.config.as_deref())?;
    let mut echo = ResolvedConfig::default();
    echo.put("command", "montecarlo");

    let d_raw = resolve_opt(args.d, &config, "d")?
        .ok_or_else(|| CliError::input("montecarlo: --d is required"))?;
    let d = parse_f64_list(&d_raw, "d")?;
    let rho = resolve(args.rho, &config, "rho", 0.0)?;
    let n = resolve(args.n, &config, "n", 1000usize)?;
    let seed = resolve(args.seed, &config, "seed", 0u64)?;
    let full_scale = resolve_switch(args.full_scale, &config, "full_scale", false)?;
    // desk-scale defaults; --full-scale switches to the long-running
    // 1000-replication, truncation-50,000 configuration
    let default_reps = if full_scale { 1000 } else { 200 };
    let default_trunc = if full_scale { 50_000 } else { 10_000 };
    let replications = resolve(args.replications, &config, "replications", default_reps)?;
    let truncation = resolve(args.truncation, &config, "truncation", default_trunc)?;
    let alpha = resolve(args.alpha, &config, "alpha", 0.85)?;
    let beta = resolve(args.beta, &config, "beta", 0.9)?;
    let skip_pole = resolve_switch(args.skip_pole, &config, "skip_pole", false)?;
    let estimators_raw = resolve(args.estimator, &config, "estimator", "raw".to_string())?;
    let format = resolve(args.format, &config, "format", "csv".to_string())?;

    let estimators: Vec<EstimatorSpec> = estimators_raw
        .split(',')
        .map(|tok| {
            parse_estimator_kind(tok).map(|kind| match kind {
                EstimatorKind::Raw => EstimatorSpec::raw(alpha),
                EstimatorKind::Smoothed => EstimatorSpec::smoothed(alpha, beta, skip_pole),
                EstimatorKind::Tapered => EstimatorSpec::tapered(alpha),
            })
        })
        .collect::<Result<_, _>>()?;

    echo.put("d", &d_raw);
    echo.put("rho", rho);
    echo.put("n", n);
    echo.put("seed", seed);
    echo.put("truncation", truncation);
    echo.put("replications", replications);
    echo.put("alpha", alpha);
    echo.put("beta", beta);
    echo.put("skip_pole", skip_pole);
    echo.put("estimator", &estimators_raw);
    echo.put("format", &format);

    let template = VarfimaSpec::equicorrelated(d, rho, truncation, 0, n)?;
    let design = McDesign::new(template, estimators, replications, seed);
    let table = mc_run(&design)?;

    let mut out = io::open_output(args.output.as_ref())?;
    match format.as_str() {
        "csv" => mc_table_csv(out.as_mut(), &echo, &table),
        "json" => {
            let value = json!({
                "schema": "longmem/1",
                "config": echo.to_json(),
                "table": serde_json::to_value(&table)
                    .map_err(|e| CliError::input(format!("serialize: {e}")))?,
            });
            io::write_json(out.as_mut(), &value)
        }
        other => Err(CliError::input(format!(
            "montecarlo: unknown format `{other}` (csv or json)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// plotdata
// ---------------------------------------------------------------------------

pub fn cmd_plotdata(args: args::PlotdataArgs) -> Result<(), CliError> {
    let config = ConfigFile::load(args.config.as_deref())?;
    let mut echo = ResolvedConfig::default();
    echo.put("command", "plotdata");
    let input = args
        .input
        .or_else(|| config.get("input").map(std::path::PathBuf::from))
        .ok_or_else(|| CliError::input("plotdata: --input is required"))?;
    echo.put("input", input.display());

    let (_, matrix) = io::read_matrix(&input)?;
    let plots = plot_data(&matrix)?;
    let value = json!({
        "schema": "longmem/1",
        "config": echo.to_json(),
        "plots": serde_json::to_value(&plots)
            .map_err(|e| CliError::input(format!("serialize: {e}")))?,
    });
    let mut out = io::open_output(args.output.as_ref())?;
    io::write_json(out.as_mut(), &value)
}
