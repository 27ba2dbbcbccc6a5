//! Command-line front end: argument definitions, file formats and the
//! subcommand implementations behind the `sepspec` binary.
//!
//! Exit codes: 0 success or affirmative verdict, 1 negative verdict,
//! 2 invalid input, 3 numeric or budget failure.

pub mod commands;
pub mod error;
pub mod format;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{run, Report};
pub use error::CliError;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Parser)]
#[command(
    name = "sepspec",
    version,
    about = "Separability from spectrum for qubit-qudit states"
)]
pub struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the eigenvalue condition for a state or a spectrum.
    Check(CheckArgs),
    /// Write an explicit separable decomposition of a state.
    Decompose(DecomposeArgs),
    /// Compare a decomposition file against a state file.
    Verify(VerifyArgs),
    /// Write random states with a given or random spectrum.
    Sample(SampleArgs),
    /// Tabulate the rotation-family diagnostics as CSV.
    Scan(ScanArgs),
    /// Search the unitary orbit of a spectrum for an NPT state.
    Witness(WitnessArgs),
}

/// A state file or an explicit spectrum.
#[derive(Debug, Args)]
pub struct SpectrumSource {
    /// State file (JSON).
    #[arg(conflicts_with = "lambdas", required_unless_present = "lambdas")]
    pub input: Option<PathBuf>,
    /// Eigenvalues, or the single keyword `uniform`.
    #[arg(long, num_args = 1.., allow_negative_numbers = true, requires = "dims")]
    pub lambdas: Option<Vec<String>>,
    /// Local dimensions `m n`.
    #[arg(long, num_args = 2, value_names = ["M", "N"])]
    pub dims: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub source: SpectrumSource,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Largest accepted Frobenius reconstruction error.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub state: PathBuf,
    pub decomposition: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConditionFilter {
    Pass,
    Fail,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, num_args = 2, value_names = ["M", "N"], required = true)]
    pub dims: Vec<usize>,
    /// Eigenvalues, or the single keyword `uniform`.
    #[arg(long, num_args = 1.., allow_negative_numbers = true,
          required_unless_present = "random_spectrum", conflicts_with = "random_spectrum")]
    pub spectrum: Option<Vec<String>>,
    /// Draw each spectrum from the flat Dirichlet distribution.
    #[arg(long)]
    pub random_spectrum: bool,
    /// Keep only random spectra that pass (or fail) the condition.
    #[arg(long = "condition-3", requires = "random_spectrum")]
    pub condition: Option<ConditionFilter>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output directory; created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 1001)]
    pub grid: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub source: SpectrumSource,
    /// Objective evaluations allowed.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Where to write the witness unitary when one is found.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
