//! `longmem` — estimation, testing, simulation and Monte Carlo for
//! multivariate long-memory time series.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure,
//! 4 estimation failure.

mod args;
mod commands;
mod config;
mod io;

use clap::Parser;
use longmem::LongmemError;

/// CLI-level error with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            exit_code: 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<LongmemError> for CliError {
    fn from(err: LongmemError) -> Self {
        let exit_code = match &err {
            LongmemError::InvalidArgument(_) => 2,
            LongmemError::Numerical(_) => 3,
            LongmemError::EstimationFailed(_) => 4,
        };
        Self {
            message: err.to_string(),
            exit_code,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self {
            message: format!("io error: {err}"),
            exit_code: 2,
        }
    }
}

/// LONGMEM_THREADS caps Monte Carlo parallelism.
fn configure_threads() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var("LONGMEM_THREADS") {
        let threads: usize = raw
            .parse()
            .map_err(|_| CliError::input(format!("LONGMEM_THREADS=`{raw}` is not a number")))?;
        if threads == 0 {
            return Err(CliError::input("LONGMEM_THREADS must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::input(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn run() -> Result<(), CliError> {
    configure_threads()?;
    let cli = args::Cli::parse();
    match cli.command {
        args::Command::Estimate(a) => commands::cmd_estimate(a),
        args::Command::Transform(a) => commands::cmd_transform(a),
        args::Command::Test(a) => commands::cmd_test(a),
        args::Command::Simulate(a) => commands::cmd_simulate(a),
        args::Command::Montecarlo(a) => commands::cmd_montecarlo(a),
        args::Command::Plotdata(a) => commands::cmd_plotdata(a),
    }
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code);
    }
}
