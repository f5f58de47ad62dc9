//! `alphamag` command-line front end.
//!
//! Results go to `--out` or standard output; progress goes to standard error.
//! Exit status is 0 on success, 1 on a computational failure and 2 on a usage
//! or parse error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use alphamag::samplers::{SamplerKind, DEFAULT_BURN_IN, DEFAULT_CANTOR_DEPTH, DEFAULT_FEIGENBAUM_A};
use alphamag::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "alphamag", version, about = "Alpha magnitude, persistent magnitude and magnitude dimension")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, env = "ALPHAMAG_THREADS")]
    threads: Option<usize>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Output file (default: standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Allow dense solves above the size cap.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a point cloud and write it as CSV with a JSON spec sidecar.
    Sample {
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Alpha magnitude curve and barcode of a point CSV.
    AlphaMag {
        input: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Classical magnitude function of a point CSV or a built-in metric.
    Magnitude {
        #[arg(required_unless_present = "fixture", conflicts_with = "fixture")]
        input: Option<PathBuf>,
        /// Built-in metric space: k32 or c4.
        #[arg(long)]
        fixture: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Alpha magnitude dimension of a sampled or loaded cloud.
    Dimension {
        /// Point CSV; when absent a cloud is drawn from the sampler flags.
        #[arg(conflicts_with = "kind")]
        input: Option<PathBuf>,
        #[command(flatten)]
        sampler: OptionalSamplerArgs,
        #[arg(long, default_value_t = alphamag::pmag::DEFAULT_PER_DECADE)]
        per_decade: usize,
        /// Lower window bound on ln t.
        #[arg(long)]
        window_low: Option<f64>,
        /// Upper window bound on ln t.
        #[arg(long)]
        window_high: Option<f64>,
        /// Also estimate on this many log-spaced subsample sizes.
        #[arg(long)]
        sweep: Option<usize>,
        /// Check convergence of |X_n| on a doubling schedule up to n first.
        #[arg(long)]
        converge: bool,
    },
    /// Pipeline against closed forms; fails if a residual exceeds its tolerance.
    OracleCheck {
        /// One of interval, union, circle, grid (default: all).
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
struct SamplerArgs {
    #[arg(long)]
    kind: SamplerKind,
    /// Number of points (lattice parameter for grid).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_CANTOR_DEPTH)]
    depth: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_FEIGENBAUM_A)]
    a: f64,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: u64,
    /// Intervals for union sampling, as `a,b;c,d`.
    #[arg(long, default_value = "0,0.1;0.3,0.4")]
    intervals: String,
}

#[derive(Args, Debug, Clone, Serialize)]
struct OptionalSamplerArgs {
    #[arg(long)]
    kind: Option<SamplerKind>,
    #[arg(long, requires = "kind")]
    n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_CANTOR_DEPTH)]
    depth: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_FEIGENBAUM_A)]
    a: f64,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: u64,
    #[arg(long, default_value = "0,0.1;0.3,0.4")]
    intervals: String,
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
struct GridArgs {
    #[arg(long, default_value_t = 0.1)]
    t_min: f64,
    #[arg(long, default_value_t = 100.0)]
    t_max: f64,
    #[arg(long, default_value_t = 20)]
    per_decade: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

/// Everything needed to reproduce a run; embedded in every output.
#[derive(Serialize)]
struct RunConfig<'a> {
    subcommand: &'static str,
    input: Option<&'a PathBuf>,
    out: Option<&'a PathBuf>,
    format: Format,
    force: bool,
    #[serde(flatten)]
    params: serde_json::Value,
}

/// Failure with its exit status.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Singular
            | Error::TooLarge { .. }
            | Error::TooFewPoints { .. }
            | Error::MalformedComplex(_)
            | Error::Io(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
