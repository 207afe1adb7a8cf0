//! Command-line definitions. Options that can also come from a config file
//! are `Option`-typed; resolution order is flag, then config key, then the
//! built-in default.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "longmem",
    version,
    about = "Semiparametric estimation of fractional differencing in multivariate long-memory time series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate the fractional differencing vector from a CSV series
    Estimate(EstimateArgs),
    /// Columnwise log-return transforms of a positive CSV series
    Transform(TransformArgs),
    /// Wald test of linear restrictions on a fit report
    Test(TestArgs),
    /// Simulate a Gaussian VARFIMA(0,d,0) path to CSV
    Simulate(SimulateArgs),
    /// Replicated simulate→estimate experiment (means, st.d., mse)
    Montecarlo(MontecarloArgs),
    /// Histogram, kernel density and scatter data from estimate rows
    Plotdata(PlotdataArgs),
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// Input CSV (one header row, one column per component)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Spectral estimator: raw, smoothed or tapered
    #[arg(long)]
    pub estimator: Option<String>,
    /// Objective bandwidth exponent, m = floor(n^alpha)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Explicit number of frequencies (overrides --alpha)
    #[arg(long)]
    pub m: Option<usize>,
    /// Smoothing bandwidth exponent, ell = floor(n^beta) (smoothed)
    #[arg(long)]
    pub beta: Option<f64>,
    /// Explicit smoothing bandwidth (overrides --beta)
    #[arg(long)]
    pub ell: Option<usize>,
    /// Restrict the smoothing sum to k != -j (smoothed)
    #[arg(long)]
    pub skip_pole: bool,
    /// Taper choice (tapered): cosine-bell
    #[arg(long)]
    pub taper: Option<String>,
    /// Lower bounds of the admissible box, comma-separated
    #[arg(long)]
    pub theta_min: Option<String>,
    /// Upper bounds of the admissible box, comma-separated
    #[arg(long)]
    pub theta_max: Option<String>,
    /// Keep sample means (default subtracts them)
    #[arg(long)]
    pub no_center: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// log-return or squared-log-return
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    /// Fit report produced by `longmem estimate`
    #[arg(long)]
    pub fit: Option<PathBuf>,
    /// Test equality of all differencing parameters
    #[arg(long)]
    pub common_d: bool,
    /// Test d = 0 (I(0) behavior)
    #[arg(long)]
    pub i0: bool,
    /// Restriction matrix, row-major: entries by ',', rows by ';'
    #[arg(long = "R")]
    pub r_matrix: Option<String>,
    /// Right-hand side, comma-separated (defaults to zeros)
    #[arg(long)]
    pub nu: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Fractional differencing vector, comma-separated
    #[arg(long)]
    pub d: Option<String>,
    /// Innovation cross-correlation (equicorrelated)
    #[arg(long)]
    pub rho: Option<f64>,
    /// Sample size
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Moving-average truncation point
    #[arg(long)]
    pub truncation: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MontecarloArgs {
    /// True fractional differencing vector, comma-separated
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Base seed; replication r uses a mixed seed derived from it
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Comma list of estimators to run per replication
    #[arg(long)]
    pub estimator: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub skip_pole: bool,
    /// Full-scale configuration: 1000 replications, truncation 50,000
    #[arg(long)]
    pub full_scale: bool,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PlotdataArgs {
    /// CSV of estimate rows (>= 10 rows)
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
