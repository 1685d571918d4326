use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "quartic-sos", version, about = "Quadratic representations of real ternary quartics")]
pub struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, env = "QUARTIC_SOS_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for the solver (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smoothness and non-negativity of a quartic.
    Check(InputArgs),
    /// All rank-3 Gram classes and their representations.
    Decompose(DecomposeArgs),
    /// Counts for the Fermat quartic and seeded random quartics.
    Corpus(CorpusArgs),
    /// Re-expand a certificate and compare it with a quartic.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Quartic as an expression in x, y, z.
    #[arg(required_unless_present = "json_in", conflicts_with = "json_in")]
    pub form: Option<String>,

    /// Quartic as a JSON map from monomials to coefficients.
    #[arg(long)]
    pub json_in: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[arg(long, default_value_t = 20_000)]
    pub restarts: usize,

    /// Write the full report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,

    /// Print every class, complex ones included.
    #[arg(long, conflicts_with = "sos_only")]
    pub all: bool,

    /// Print only the sum-of-squares certificates.
    #[arg(long)]
    pub sos_only: bool,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Number of random quartics after the Fermat quartic.
    #[arg(long, default_value_t = 3)]
    pub count: usize,

    #[arg(long, default_value_t = 20_000)]
    pub restarts: usize,

    /// Write the table as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Certificate JSON: one certificate, a list, or a decompose report.
    #[arg(long)]
    pub cert: PathBuf,
}
