//! `nvsim`: protocol runs, fidelity sweeps, and rate reports as CSV.
//!
//! Exit codes: 0 success, 1 internal invariant violation, 2 bad flags or
//! configuration.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nvsim_core::protocol::ProtocolKind;

#[derive(Parser)]
#[command(name = "nvsim", version, about = "Entangled photon string simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repeated protocol runs with per-trial outcomes and a summary row.
    Run(RunArgs),
    /// Mean output fidelity as a function of string length.
    FidelitySweep(SweepArgs),
    /// Chain-length Monte Carlo histogram plus the detection-rate report.
    Rates(RatesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum KindArg {
    Ghz,
    Cluster,
}

impl KindArg {
    pub fn to_kind(self) -> ProtocolKind {
        match self {
            KindArg::Ghz => ProtocolKind::Ghz,
            KindArg::Cluster => ProtocolKind::Cluster,
        }
    }
}

#[derive(Args)]
pub struct RunArgs {
    /// Target state family.
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Photons in the string.
    #[arg(long)]
    pub photons: u32,
    /// Number of protocol runs.
    #[arg(long)]
    pub trials: u64,
    /// Master seed; every random draw derives from it.
    #[arg(long)]
    pub seed: u64,
    /// Noise configuration file (key=value lines); omitted means ideal.
    #[arg(long)]
    pub noise: Option<PathBuf>,
    /// Retry shelved attempts until every trial completes.
    #[arg(long)]
    pub post_select: bool,
    /// Output CSV path (joined to NVSIM_OUT_DIR when relative).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Target state family.
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Largest string length; the sweep covers 2..=mmax.
    #[arg(long)]
    pub mmax: u32,
    /// Trials averaged per length.
    #[arg(long)]
    pub trials: u64,
    /// Gate rotation-angle error bound, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub gate_err_deg: f64,
    /// Per-interval nuclear phase bound, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub bath_err_deg: f64,
    /// Cancel the electron's interval phase each cycle.
    #[arg(long)]
    pub hahn_echo: bool,
    /// Master seed.
    #[arg(long)]
    pub seed: u64,
    /// Output CSV path (joined to NVSIM_OUT_DIR when relative).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct RatesArgs {
    /// Photon spacing, microseconds.
    #[arg(long)]
    pub tau_us: f64,
    /// Operation window, microseconds.
    #[arg(long)]
    pub window_us: f64,
    /// Monte Carlo windows to simulate.
    #[arg(long)]
    pub reps: u64,
    /// Zero-phonon-line fraction of emission.
    #[arg(long)]
    pub zpl: f64,
    /// Collection efficiency per photon.
    #[arg(long)]
    pub collection: f64,
    /// Detector efficiency per photon.
    #[arg(long, default_value_t = 1.0)]
    pub detector: f64,
    /// Chain length the rate report targets.
    #[arg(long)]
    pub target_m: u32,
    /// Count the trailing disentangling photon in the efficiency stack.
    #[arg(long)]
    pub include_final_photon: bool,
    /// Master seed for the Monte Carlo histogram.
    #[arg(long)]
    pub seed: u64,
    /// Output CSV path (joined to NVSIM_OUT_DIR when relative).
    #[arg(long)]
    pub out: PathBuf,
}

/// Failures split by exit code: bad user input (2) vs broken invariants (1).
pub enum CmdError {
    Config(String),
    Internal(anyhow::Error),
}

impl From<nvsim_core::Error> for CmdError {
    fn from(e: nvsim_core::Error) -> Self {
        CmdError::Internal(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => commands::cmd_run(&args),
        Command::FidelitySweep(args) => commands::cmd_fidelity_sweep(&args),
        Command::Rates(args) => commands::cmd_rates(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CmdError::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
