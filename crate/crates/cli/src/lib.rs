//! Command-line front end: scenario files in, CSV/SVG/text out.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod error;
pub mod output;
pub mod scenario;

pub use commands::Outcome;
pub use error::CliError;
pub use scenario::{ModeSpec, Scenario};

#[derive(Debug, Parser)]
#[command(
    name = "pmu",
    version,
    about = "Joint CPU DVFS and motor-speed energy optimization experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady-state throughput and trip energy over the whole grid.
    Sweep(SweepArgs),
    /// Simulate one mission and write its trace, controller log and report.
    Run(RunArgs),
    /// Controlled versus the HS, AS and AS_star baselines for every
    /// environment and app in the scenario.
    Compare(CompareArgs),
    /// Cheapest feasible DVFS level per speed, from a scenario or a grid CSV.
    Frontier(FrontierArgs),
}

/// Which environment and app of the scenario to use; defaults to the first
/// declared of each.
#[derive(Debug, Clone, Default, Args)]
pub struct Selection {
    #[arg(long)]
    pub environment: Option<String>,
    #[arg(long)]
    pub app: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Entropy to sweep at instead of the environment's first segment.
    #[arg(long)]
    pub entropy: Option<f64>,
    #[command(flatten)]
    pub select: Selection,
    /// Accepted for interface stability; runs are deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// controlled, hs, as, as-star or fixed:I,J; defaults to the scenario's mode.
    #[arg(long)]
    pub mode: Option<ModeSpec>,
    /// Simulation step in seconds.
    #[arg(long)]
    pub dt: Option<f64>,
    #[command(flatten)]
    pub select: Selection,
    /// Accepted for interface stability; runs are deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Accepted for interface stability; runs are deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FrontierArgs {
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    pub scenario: Option<PathBuf>,
    /// A grid.csv written by `sweep`.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, conflicts_with = "grid")]
    pub entropy: Option<f64>,
    #[command(flatten)]
    pub select: Selection,
    /// Accepted for interface stability; runs are deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Sweep(a) => commands::cmd_sweep(a),
        Command::Run(a) => commands::cmd_run(a),
        Command::Compare(a) => commands::cmd_compare(a),
        Command::Frontier(a) => commands::cmd_frontier(a),
    }
}
