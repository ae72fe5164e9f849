pub mod decode;
pub mod derand;
pub mod dp;
pub mod embed;
pub mod gen;
pub mod verify;

use std::path::PathBuf;

/// Flags shared by the experiment commands.
#[derive(clap::Args, Debug)]
pub struct ExperimentFlags {
    /// Monte Carlo trial count.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Seed for all randomness (required: no silent entropy).
    #[arg(long)]
    pub seed: u64,
    /// Estimator worker threads; outputs are identical for any value.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Enumeration budget for exact oracles.
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u128,
    /// Report CSV path.
    #[arg(long)]
    pub report: PathBuf,
    /// Optional full manifest sidecar (includes timestamps).
    #[arg(long)]
    pub manifest_out: Option<PathBuf>,
}
