//! `gpk`: generate oracles, run GPK-based solvers and print reproducible
//! reports.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gpk_core::GpkError;

const BIT_ORDER_NOTE: &str = "Binary strings are written most significant position first: \
position 0 is the rightmost character, so 0001 is the unit vector at position 0.";

#[derive(Debug, Parser)]
#[command(name = "gpk", version, about = "Phase kick-back marker toolkit", after_help = BIT_ORDER_NOTE)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every randomized step of the command.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random oracle file.
    Gen(GenArgs),
    /// Run GPK once and print the outcome distribution.
    Gpk(GpkArgs),
    /// Determine the image dimension of a fully balanced oracle.
    Fbi(FbiArgs),
    /// Recover the hidden subgroup of a Simon-type oracle.
    Simon(SimonArgs),
    /// Classical brute-force analysis of an oracle.
    Verify(VerifyArgs),
    /// Run a benchmark suite.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum GenKind {
    FullyBalanced,
    Simon,
    Affine,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendChoice {
    Fwht,
    Statevector,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Fwht,
    Statevector,
}

impl From<EngineChoice> for gpk_core::Backend {
    fn from(c: EngineChoice) -> Self {
        match c {
            EngineChoice::Fwht => gpk_core::Backend::Fwht,
            EngineChoice::Statevector => gpk_core::Backend::Statevector,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Suite {
    FwhtScaling,
    FbiCalls,
    SimonIters,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Image dimension (fully_balanced) or matrix rank (affine).
    #[arg(long)]
    pub r: Option<usize>,
    /// Hidden subgroup dimension (simon).
    #[arg(long)]
    pub k: Option<usize>,
    /// Output value for the constant kind; random if omitted.
    #[arg(long)]
    pub value: Option<String>,
    /// Oracle file to write. The simon kind also writes `<out>.answer`.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GpkArgs {
    pub oracle: PathBuf,
    #[arg(long)]
    pub marker: String,
    #[arg(long, value_enum, default_value_t = BackendChoice::Fwht)]
    pub backend: BackendChoice,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FbiArgs {
    pub oracle: PathBuf,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub algorithm: u8,
    /// With algorithm 1: decide between r = 0 and this r instead of r = 1.
    #[arg(long)]
    pub r0: Option<usize>,
    #[arg(long, value_enum, default_value_t = EngineChoice::Fwht)]
    pub backend: EngineChoice,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SimonArgs {
    pub oracle: PathBuf,
    #[arg(long, default_value_t = gpk_core::simon::DEFAULT_STALL_LIMIT)]
    pub stall_limit: usize,
    /// Samples for the empirical distribution table; 0 skips it.
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
    /// Expected subgroup basis (the sidecar written by `gen simon`).
    #[arg(long)]
    pub answer: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = EngineChoice::Fwht)]
    pub backend: EngineChoice,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub oracle: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// fwht_scaling: largest n+m.
    #[arg(long, default_value_t = 14)]
    pub max_qubits: usize,
    /// fwht_scaling: also report wall-clock times (not reproducible).
    #[arg(long)]
    pub wall_time: bool,
    /// fbi_calls: largest output width.
    #[arg(long, default_value_t = 6)]
    pub max_m: usize,
    /// fbi_calls: instances per (m, r).
    #[arg(long, default_value_t = 4)]
    pub instances: usize,
    /// simon_iters: input width.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// simon_iters: output width.
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    /// simon_iters: runs per (mode, k).
    #[arg(long, default_value_t = 50)]
    pub runs: usize,
    #[arg(long, default_value_t = gpk_core::simon::DEFAULT_STALL_LIMIT)]
    pub stall_limit: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

/// Why a command did not succeed, mapped onto the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Report already emitted; the result failed verification.
    Verification(String),
    Core(GpkError),
    Input(String),
}

impl From<GpkError> for Failure {
    fn from(e: GpkError) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 2,
            Failure::Core(GpkError::InvalidPromise(_) | GpkError::BudgetExceeded { .. }) => 2,
            Failure::Core(GpkError::ResourceLimit { .. }) => 3,
            Failure::Core(_) | Failure::Input(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Verification(msg) => write!(f, "verification failed: {msg}"),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Input(msg) => write!(f, "{msg}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(4),
            };
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Gpk(a) => commands::gpk(a),
        Command::Fbi(a) => commands::fbi(a),
        Command::Simon(a) => commands::simon(a),
        Command::Verify(a) => commands::verify(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("gpk: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
