//! `ibclab`: command-line front end for the impedance boundary lab.
//!
//! Exit codes: 0 success, 1 invalid input, 2 a checked property was violated.

mod commands;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Caps the rayon worker pool used by sweep commands.
const THREADS_ENV: &str = "IBCLAB_THREADS";

#[derive(Parser)]
#[command(
    name = "ibclab",
    version,
    about = "Impedance boundary condition laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the coupled wave/IBC simulation and write the energy time series.
    Simulate { config: PathBuf },
    /// Sample the kernel for positive-realness and report closed-form conditions.
    KernelCheck { config: PathBuf },
    /// Discretize a diffusive measure and compare it with its closed form.
    MeasureFit { config: PathBuf },
    /// Solve the Laplace-domain problem over a sweep of s values.
    ResolventScan { config: PathBuf },
    /// Eigenvalues, dissipativity and injectivity of the semi-discrete generator.
    Spectrum { config: PathBuf },
    /// Run a quick version of the invariant suite.
    Selftest,
}

pub enum Outcome {
    Pass,
    Violation(String),
}

fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            // Fails only if a pool already exists, which cannot happen this early.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let result = match &cli.command {
        Command::Simulate { config } => commands::simulate(config),
        Command::KernelCheck { config } => commands::kernel_check(config),
        Command::MeasureFit { config } => commands::measure_fit(config),
        Command::ResolventScan { config } => commands::resolvent_scan(config),
        Command::Spectrum { config } => commands::spectrum(config),
        Command::Selftest => Ok(selftest::run()),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Violation(msg)) => {
            eprintln!("property violated: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
