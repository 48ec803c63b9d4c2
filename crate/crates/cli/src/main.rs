// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! `tickwork` — simulate measurement-driven quantum clocks and predict
//! their tick statistics from the tilted-generator spectrum.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tickwork_cli::commands::{self, CmdError};
use tickwork_cli::config::{self, effective_seed, resolve, ConfigError};

#[derive(Parser)]
#[command(
    name = "tickwork",
    version,
    about = "Measurement-driven quantum clock simulator and tick-statistics analyzer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Figure preset: fig2 | fig3 | fig4 | fig6 | fig7.
    #[arg(long)]
    preset: Option<String>,
    /// JSON configuration file merged over the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; beats config and the TICKWORK_SEED environment variable.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: current directory).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Parameter sweep, e.g. gamma_m=0.5:3:3 or gamma_m=0.1:10:17:log.
    #[arg(long)]
    sweep: Option<String>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Tolerance for the Gaussian completeness quadrature check.
    #[arg(long)]
    tol: Option<f64>,
    /// Test hook: inject an invalid Kraus pair to exercise the failure path.
    #[arg(long, hide = true)]
    inject_bad_kraus: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state populations and derived clock figures of merit.
    Steady(RunArgs),
    /// Tilted-spectrum predictions: SCGF curve, moments, Mandel Q.
    Ldt(RunArgs),
    /// Trajectory ensembles with windowed count statistics.
    Simulate(RunArgs),
    /// Run the built-in self-check suites.
    Validate(ValidateArgs),
}

fn load_config(args: &RunArgs) -> Result<config::ExperimentConfig, ConfigError> {
    let file_json = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
            Some(
                serde_json::from_str(&text)
                    .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    resolve(
        args.preset.as_deref(),
        file_json,
        args.seed,
        args.sweep.as_deref(),
    )
}

fn run(
    args: &RunArgs,
    f: impl Fn(&config::ExperimentConfig, &std::path::Path, u64) -> Result<(), CmdError>,
) -> ExitCode {
    let config = match load_config(args) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let seed = effective_seed(&config);
    match f(&config, &args.out, seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Steady(args) => run(args, commands::cmd_steady),
        Command::Ldt(args) => run(args, commands::cmd_ldt),
        Command::Simulate(args) => run(args, commands::cmd_simulate),
        Command::Validate(args) => {
            ExitCode::from(commands::cmd_validate(args.tol, args.inject_bad_kraus) as u8)
        }
    }
}
