//! CSV and JSON input/output. CSV: comma-separated, one header row, '#'
//! comment lines allowed, numbers emitted with 17 significant digits for a
//! lossless round trip.

use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::Deserialize;

use longmem::MultiSeries;

use crate::config::ResolvedConfig;
use crate::CliError;

/// 17 significant digits — the f64 round-trip format.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Read an n×q numeric matrix from a CSV file with a header row.
pub fn read_matrix(path: &Path) -> Result<(Vec<String>, Array2<f64>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::input(format!("{}: bad header: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let q = headers.len();
    let mut rows: Vec<f64> = Vec::new();
    let mut n = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let line = record
            .position()
            .map(|p| p.line().to_string())
            .unwrap_or_else(|| "?".into());
        if record.len() != q {
            return Err(CliError::input(format!(
                "{}: line {line}: expected {q} fields, got {}",
                path.display(),
                record.len()
            )));
        }
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::input(format!(
                    "{}: line {line}, column {}: `{field}` is not a number",
                    path.display(),
                    col + 1
                ))
            })?;
            rows.push(v);
        }
        n += 1;
    }
    if n == 0 {
        return Err(CliError::input(format!("{}: no data rows", path.display())));
    }
    let matrix = Array2::from_shape_vec((n, q), rows)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok((headers, matrix))
}

pub fn read_series(path: &Path) -> Result<MultiSeries, CliError> {
    let (_, matrix) = read_matrix(path)?;
    MultiSeries::new(matrix).map_err(CliError::from)
}

/// Write a matrix as CSV: config echo comments, then a header row, then the
/// data with 17-significant-digit numbers.
pub fn write_matrix_csv(
    out: &mut dyn Write,
    config: &ResolvedConfig,
    headers: &[String],
    matrix: &Array2<f64>,
) -> Result<(), CliError> {
    out.write_all(config.csv_header().as_bytes())?;
    writeln!(out, "{}", headers.join(","))?;
    for row in matrix.rows() {
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Destination: a file path or stdout.
pub fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = std::fs::File::create(p)
                .map_err(|e| CliError::input(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(std::io::BufWriter::new(f)))
        }
        None => Ok(Box::new(std::io::BufWriter::new(std::io::stdout()))),
    }
}

pub fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)
        .map_err(|e| CliError::input(format!("cannot serialize: {e}")))?;
    writeln!(out)?;
    Ok(())
}

/// The estimation report consumed back by `longmem test`.
#[derive(Debug, Deserialize)]
pub struct FitReport {
    pub schema: String,
    pub m: usize,
    pub d_hat: Vec<f64>,
    pub omega: Vec<Vec<f64>>,
}

pub fn read_fit_report(path: &Path) -> Result<FitReport, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let report: FitReport = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: not a fit report: {e}", path.display())))?;
    if report.schema != "longmem/1" {
        return Err(CliError::input(format!(
            "{}: unsupported schema `{}`",
            path.display(),
            report.schema
        )));
    }
    Ok(report)
}

pub fn matrix_to_json(m: &Array2<f64>) -> serde_json::Value {
    serde_json::json!(m.rows().into_iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}
