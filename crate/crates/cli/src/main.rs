//! `nvq`: compress, decompress and evaluate embedding datasets.
//!
//! Exit codes: 0 success, 1 other failures, 2 invalid configuration,
//! 3 I/O errors, 4 malformed input files.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nvq::NonlinearityFamily;
use nvq::NvqError;

#[derive(Debug, Parser)]
#[command(
    name = "nvq",
    version,
    about = "Per-vector non-uniform scalar quantization"
)]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic bell-shaped vectors as fvecs.
    Synth(SynthArgs),
    /// Compress an fvecs file into an NVQ1 container.
    Compress(CompressArgs),
    /// Decode an NVQ1 container back to fvecs.
    Decompress(DecompressArgs),
    /// Report reconstruction and retrieval quality as CSV.
    Eval(EvalArgs),
    /// Time scalar encode and decode throughput per nonlinearity.
    Bench(BenchArgs),
    /// Print the header and a summary of an NVQ1 container.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads for per-vector work (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// File of `key = value` lines read before the command-line flags.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Seed of the subvector partition and of every fit.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    /// Stopping tolerance on the change of the search mean.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 768)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value = "loglog", value_parser = parse_family)]
    pub family: NonlinearityFamily,
    /// Bits per value: 4 or 8.
    #[arg(long, default_value_t = 8)]
    pub bits: u8,
    /// Subvectors per vector: 1, 2, 4 or 8.
    #[arg(long, default_value_t = 1)]
    pub subvectors: usize,
    #[command(flatten)]
    pub fit: FitArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DecompressArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Raw vectors (fvecs).
    #[arg(long)]
    pub input: PathBuf,
    /// Evaluate this container instead of sweeping configurations.
    #[arg(long)]
    pub compressed: Option<PathBuf>,
    /// Families to sweep (repeatable; default: all four).
    #[arg(long, value_parser = parse_family)]
    pub family: Vec<NonlinearityFamily>,
    /// Bit widths to sweep (repeatable; default: 8).
    #[arg(long)]
    pub bits: Vec<u8>,
    /// Subvector counts to sweep (repeatable; default: 1).
    #[arg(long)]
    pub subvectors: Vec<usize>,
    /// Query vectors (fvecs); synthetic queries are drawn when absent.
    #[arg(long)]
    pub query_file: Option<PathBuf>,
    /// Number of synthetic queries.
    #[arg(long, default_value_t = 100)]
    pub queries: usize,
    /// Exact neighbor ids per query (ivecs); brute-forced when absent.
    #[arg(long)]
    pub ground_truth: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// CSV report path (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write every subvector's objective ratio to this CSV.
    #[arg(long)]
    pub per_vector: Option<PathBuf>,
    #[command(flatten)]
    pub fit: FitArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Scalar operations timed per family and direction.
    #[arg(long, default_value_t = 100_000_000)]
    pub ops: u64,
    #[arg(long, default_value_t = 8)]
    pub bits: u8,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV report path (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

fn parse_family(s: &str) -> Result<NonlinearityFamily, String> {
    s.parse().map_err(|e: NvqError| e.to_string())
}

/// Splices the `--config` file's flags in right after the subcommand, so that
/// flags given on the command line take precedence.
fn expand_config(mut argv: Vec<OsString>) -> Result<Vec<OsString>, NvqError> {
    let mut path = None;
    let mut i = 2;
    while i < argv.len() {
        let arg = argv[i].to_string_lossy().into_owned();
        if arg == "--config" {
            let value = argv
                .get(i + 1)
                .ok_or_else(|| NvqError::Config("--config needs a file".into()))?;
            path = Some(PathBuf::from(value));
            argv.drain(i..i + 2);
            continue;
        }
        if let Some(v) = arg.strip_prefix("--config=") {
            path = Some(PathBuf::from(v));
            argv.remove(i);
            continue;
        }
        i += 1;
    }
    if let Some(p) = path {
        let extra = config::config_args(&p)?;
        argv.splice(2..2, extra);
    }
    Ok(argv)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<NvqError>() {
        Some(NvqError::Config(_))
        | Some(NvqError::DimensionMismatch { .. })
        | Some(NvqError::Constraint(_)) => 2,
        Some(NvqError::Io(_)) => 3,
        Some(NvqError::Format { .. }) => 4,
        Some(_) => 1,
        None if err.downcast_ref::<std::io::Error>().is_some() => 3,
        None => match err.downcast_ref::<csv::Error>() {
            Some(e) if e.is_io_error() => 3,
            _ => 1,
        },
    }
}

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e.into()));
        }
    };
    let cli = Cli::parse_from(argv);
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
