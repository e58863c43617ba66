// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use entsim_cli::commands::{
    run_dispersion, run_evolve, run_field, run_rates, run_sweep, run_validate, SweepOptions,
};
use entsim_cli::error::Result;
use entsim_cli::scenario::Scenario;

/// Two-qubit entanglement over nonreciprocal photonic channels.
#[derive(Parser)]
#[command(name = "entsim", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for parallel sections (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a scenario and run every consistency check, writing nothing.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Build the coupling rates; for the interface source also the profile.
    Rates {
        #[command(flatten)]
        common: Common,
    },
    /// Integrate the master equation and record the concurrence.
    Evolve {
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a parameter sweep point by point.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Cross-check each steady state by long-time integration.
        #[arg(long)]
        by_integration: bool,
    },
    /// Scan the interface field on the configured grid.
    Field {
        #[command(flatten)]
        common: Common,
    },
    /// Scan bulk wavenumbers and surface-wave poles over frequency.
    Dispersion {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Validate { common }
            | Command::Rates { common }
            | Command::Evolve { common }
            | Command::Sweep { common, .. }
            | Command::Field { common }
            | Command::Dispersion { common } => common,
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let common = cli.command.common();
    if common.workers > 0 {
        // Applies to every rayon-parallel section: sweeps and field grids.
        rayon::ThreadPoolBuilder::new()
            .num_threads(common.workers)
            .build_global()
            .map_err(|e| entsim_cli::CliError::Validation(format!("workers: {e}")))?;
    }
    let scenario = Scenario::load(&common.scenario)?;
    match &cli.command {
        Command::Validate { .. } => run_validate(&scenario),
        Command::Rates { common } => run_rates(&scenario, &common.out),
        Command::Evolve { common } => run_evolve(&scenario, &common.out),
        Command::Sweep { common, by_integration } => run_sweep(
            &scenario,
            &common.out,
            SweepOptions { by_integration: *by_integration },
        ),
        Command::Field { common } => run_field(&scenario, &common.out),
        Command::Dispersion { common } => run_dispersion(&scenario, &common.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
