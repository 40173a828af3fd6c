//! `lerchz`: evaluate the Lerch zeta-function, locate and trace its zeros.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lerchz_core::{Error, Kind, SPoint};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "lerchz", version, about = "Lerch zeta-function values, zeros and zero trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Evaluate L(lambda, alpha, s) or one of its s-derivatives.
    Eval(EvalArgs),
    /// Locate and certify the zeros of L or L' in a rectangle.
    Zeros(ZerosArgs),
    /// Follow a zero of L(lambda, lambda, s) or its derivative as lambda changes.
    Trace(TraceArgs),
    /// Count zeros of L and L' in a window left of the critical line and pair them.
    Census(CensusArgs),
    /// Tabulate Re L'/L along a vertical line.
    ScanLine(ScanLineArgs),
    /// Check the functional equation on a grid of points.
    FeCheck(FeCheckArgs),
}

#[derive(Args, Debug, Serialize)]
struct EvalArgs {
    #[arg(long)]
    lambda: f64,
    /// Defaults to lambda.
    #[arg(long)]
    alpha: Option<f64>,
    /// The point, as "a+bi".
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    /// Order of the s-derivative (0, 1 or 2).
    #[arg(long, default_value_t = 0)]
    derivative: usize,
    /// Relative tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
struct ZerosArgs {
    #[arg(long)]
    lambda: f64,
    /// Defaults to lambda.
    #[arg(long)]
    alpha: Option<f64>,
    /// "sigma_min,sigma_max,t_min,t_max".
    #[arg(long = "box", allow_hyphen_values = true)]
    rect: String,
    /// L or Lprime.
    #[arg(long, default_value = "L", value_parser = parse_kind)]
    kind: Kind,
    /// Output file; the catalog goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct TraceArgs {
    #[arg(long)]
    lambda_from: f64,
    #[arg(long)]
    lambda_to: f64,
    /// A point near a zero at lambda_from, as "a+bi".
    #[arg(long, allow_hyphen_values = true)]
    start: String,
    #[arg(long, default_value = "L", value_parser = parse_kind)]
    kind: Kind,
    /// Trajectory JSON.
    #[arg(long)]
    out: PathBuf,
    /// Plot data; defaults to the output path with a `.csv` extension.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Initial and maximal step in lambda.
    #[arg(long, default_value_t = 1e-3)]
    h_init: f64,
    /// Smallest step before the trace stops.
    #[arg(long, default_value_t = 1e-7)]
    h_min: f64,
}

#[derive(Args, Debug, Serialize)]
struct CensusArgs {
    #[arg(long)]
    lambda: f64,
    /// Lower height T.
    #[arg(long)]
    t: f64,
    /// Window height U.
    #[arg(long)]
    u: f64,
    /// Zeros with |sigma - 1/2| < eta count as on the line.
    #[arg(long, default_value_t = lerchz_core::census::DEFAULT_ETA)]
    eta: f64,
    /// Right edge of the L' search box.
    #[arg(long, default_value_t = lerchz_core::census::DEFAULT_SIGMA1)]
    sigma1: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ScanLineArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long, allow_hyphen_values = true)]
    sigma: f64,
    #[arg(long)]
    t_from: f64,
    #[arg(long)]
    t_to: f64,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    /// A zero catalog; scan points within 1e-3 of its zeros are skipped.
    #[arg(long)]
    zeros: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct FeCheckArgs {
    #[arg(long)]
    lambda: f64,
    /// Defaults to lambda.
    #[arg(long)]
    alpha: Option<f64>,
    /// Largest acceptable relative residual.
    #[arg(long, default_value_t = 1e-7)]
    threshold: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_kind(text: &str) -> Result<Kind, Error> {
    text.parse()
}

fn parse_point(text: &str) -> Result<SPoint, Error> {
    text.parse()
}

/// A failed run and its exit status.
#[derive(Debug)]
pub(crate) struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub(crate) fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    pub(crate) fn numeric(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub(crate) fn truncated(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::InvalidBox(_) | Error::DomainError(_) | Error::PoleAtOne | Error::EdgeOfDomain(_) => {
                Failure::usage(e.to_string())
            }
            _ => Failure::numeric(e.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("LERCHZ_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::usage(format!("LERCHZ_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::usage(format!("cannot configure {threads} threads: {e}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let run = configure_threads().and_then(|_| commands::run(&cli.command));
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("lerchz: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
