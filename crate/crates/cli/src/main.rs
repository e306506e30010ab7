//! Command-line front end for the exact solver, regime models, simulator and
//! fits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod input;
mod table;

use clap::{Parser, Subcommand};
use config::{Flags, RunConfig};
use error::CliError;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "ising-qec", version, about = "Toric and planar code failure rates: exact, simulated and fitted")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact post-selected failure rate over a p grid.
    Exact(Flags),
    /// Monte-Carlo failure rates with the exact matching decoder.
    Simulate(Flags),
    /// Domain-wall energy-cost histograms.
    Gapdist(Flags),
    /// Fit a model to a curve, shot or gap file.
    Fit(Flags),
    /// Kramers–Wannier duality residuals.
    Duality(Flags),
    /// Path-counting estimates with validity boundary.
    Pathcount(Flags),
    /// Capillary-wave estimates with validity boundary.
    Capillary(Flags),
    /// Exact-curve scaling collapse and its ε-window.
    Collapse(Flags),
    /// Exhaustive low-order failure polynomial.
    Failpoly(Flags),
}

impl Command {
    fn split(&self) -> (&'static str, &Flags) {
        match self {
            Command::Exact(f) => ("exact", f),
            Command::Simulate(f) => ("simulate", f),
            Command::Gapdist(f) => ("gapdist", f),
            Command::Fit(f) => ("fit", f),
            Command::Duality(f) => ("duality", f),
            Command::Pathcount(f) => ("pathcount", f),
            Command::Capillary(f) => ("capillary", f),
            Command::Collapse(f) => ("collapse", f),
            Command::Failpoly(f) => ("failpoly", f),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, flags) = cli.command.split();
    let cfg = RunConfig::resolve(name, flags)?;
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(CliError::Usage("threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    commands::run(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ising-qec: {e}");
            e.exit_code()
        }
    }
}
