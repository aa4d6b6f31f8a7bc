//! `wavestab`: traveling waves, spectra, stability verdicts and evolutions from the command line.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wavestab_core::{config, WaveError};

#[derive(Debug, Parser)]
#[command(name = "wavestab", version, about = "Periodic traveling waves and their orbital stability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Selects a traveling wave: a closed-form family member, optionally continued to another `A`.
#[derive(Debug, Clone, Args)]
pub struct WaveArgs {
    /// bbm | rbo | fifth | frac:<alpha>
    #[arg(long, default_value = "fifth")]
    pub model: String,
    #[arg(long)]
    pub omega: f64,
    /// Integration constant; defaults to the closed-form family value.
    #[arg(long = "A", allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long = "N", default_value_t = config::DEFAULT_N)]
    pub n: usize,
    /// Period; defaults to the closed-form family period.
    #[arg(long = "L0")]
    pub period: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct and polish a wave; writes `x,phi` CSV.
    Wave {
        #[command(flatten)]
        wave: WaveArgs,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// Summary JSON (mean, integral, residual).
        #[arg(long)]
        json: Option<std::path::PathBuf>,
    },
    /// Spectrum of the linearized operator; writes a report JSON and an eigenvalue CSV.
    Spectrum {
        #[command(flatten)]
        wave: WaveArgs,
        #[arg(long)]
        tol_zero: Option<f64>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        #[arg(long)]
        csv: Option<std::path::PathBuf>,
    },
    /// Stability report with the verdict.
    Stability {
        #[command(flatten)]
        wave: WaveArgs,
        /// Also compute parameter derivatives by finite differences.
        #[arg(long)]
        fd: bool,
        #[arg(long)]
        tol_zero: Option<f64>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Constrained minimization of B on {∫u³ = γ}.
    Minimize {
        #[arg(long, default_value = "rbo")]
        model: String,
        #[arg(long)]
        omega0: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long = "N", default_value_t = config::DEFAULT_N)]
        n: usize,
        #[arg(long = "L0")]
        period: Option<f64>,
        #[arg(long, default_value_t = config::MINIMIZER_MAX_ITER)]
        max_iter: usize,
        /// Use the plain L² gradient instead of the B-metric one.
        #[arg(long)]
        plain_gradient: bool,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// `x,phi,u` CSV of the polished wave and the descent limit.
        #[arg(long)]
        csv: Option<std::path::PathBuf>,
    },
    /// Evolve a perturbed wave; writes the trajectory CSV.
    Evolve {
        #[command(flatten)]
        wave: WaveArgs,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Time step; defaults to min(1e-3, stability bound).
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "T", default_value_t = 10.0)]
        t_final: f64,
        #[arg(long, default_value_t = 100)]
        record_every: usize,
        #[arg(long, default_value_t = config::DEFAULT_SEED)]
        seed: u64,
        /// Fourier modes in the random perturbation.
        #[arg(long, default_value_t = 8)]
        modes: usize,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Profile and log-concavity data of the fifth-order wave.
    Figure1 {
        #[arg(long, default_value_t = 2.0)]
        omega: f64,
        #[arg(long = "N", default_value_t = config::DEFAULT_N)]
        n: usize,
        /// Coefficient window upper index for the discrete log-concavity samples.
        #[arg(long, default_value_t = 20)]
        window: usize,
        #[arg(long, default_value = ".")]
        out_dir: std::path::PathBuf,
    },
    /// Stability verdicts over an ω grid, evaluated in parallel.
    Sweep {
        #[arg(long, default_value = "fifth")]
        model: String,
        #[arg(long)]
        omega_min: f64,
        #[arg(long)]
        omega_max: f64,
        #[arg(long, default_value_t = 11)]
        count: usize,
        #[arg(long = "A", allow_negative_numbers = true)]
        a: Option<f64>,
        #[arg(long = "N", default_value_t = config::DEFAULT_N)]
        n: usize,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

/// Exit status: 2 for configuration errors, 3 for numerical failures.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<commands::ConfigError>().is_some() || err.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    match err.downcast_ref::<WaveError>() {
        Some(
            WaveError::InvalidConfig(_)
            | WaveError::InvalidGrid(_)
            | WaveError::InvalidSymbol { .. }
            | WaveError::Domain(_)
            | WaveError::GridMismatch
            | WaveError::BadSeed(_),
        ) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
