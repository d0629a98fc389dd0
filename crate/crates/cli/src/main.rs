//! `qgraph`: spectra of Schrödinger operators on metric graphs with δ-couplings.
//!
//! Exit codes: 0 success, 1 error, 2 uncertified spectrum.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qgraph", version, about = "Spectra of Schrödinger operators on metric graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute eigenvalues with the secular solver, the FEM oracle, or both.
    Spectrum(SpectrumArgs),
    /// Averaged eigenvalue shifts against the free operator on the same graph.
    TraceAvg(TraceAvgArgs),
    /// Evaluate the rigidity functionals and sufficient conditions.
    Check(CheckArgs),
    /// Write a bundled example graph and run every analysis on it.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Secular,
    Fem,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Counterexample,
    Star3,
    Interval,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Report path; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("{v} is not a positive finite number")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["count", "lambda_max"])))]
pub struct SpectrumArgs {
    /// Graph description (JSON).
    #[arg(long)]
    pub graph: PathBuf,
    /// Number of eigenvalues, counted with multiplicity.
    #[arg(long)]
    pub count: Option<usize>,
    /// Return every eigenvalue up to this value.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda_max: Option<f64>,
    #[arg(long, value_enum, default_value_t = Method::Secular)]
    pub method: Method,
    /// Absolute eigenvalue tolerance.
    #[arg(long, default_value_t = 1e-8, value_parser = positive)]
    pub tol: f64,
    /// FEM mesh size.
    #[arg(long, default_value_t = 1e-3, value_parser = positive)]
    pub mesh_size: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TraceAvgArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Number of excited eigenvalues N (at least 10).
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 1e-8, value_parser = positive)]
    pub tol: f64,
    /// Two-column `N S_N` data file for plotting.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Tolerance band on the inequalities.
    #[arg(long, default_value_t = qgraph::ambarzumian::DEFAULT_TOL, value_parser = positive)]
    pub tol: f64,
    /// Verdict JSON path; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(value_enum)]
    pub name: DemoName,
    /// Directory receiving the example graph file.
    #[arg(long, default_value = ".")]
    pub dir: PathBuf,
}

/// Successful runs either certify their spectra or flag them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Certified,
    Uncertified,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a),
        Command::TraceAvg(a) => commands::trace_avg(a),
        Command::Check(a) => commands::check(a),
        Command::Demo(a) => commands::demo(a),
    };
    match result {
        Ok(Outcome::Certified) => ExitCode::SUCCESS,
        Ok(Outcome::Uncertified) => {
            eprintln!("warning: spectrum not certified by the Weyl count");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
