//! `calderon-states <command> --config <path> [--out <dir>] [--seed <u64>]`
//!
//! Exit codes: 0 success, 1 I/O, 2 config, 3 domain, 4 solver, 5 failed checks.

mod commands;
mod config;
mod csvout;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::CliError;

const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Parser)]
#[command(name = "calderon-states", version, about = "Boundary-projector state construction on the circle: build the projector pair, verify its identities, compare against closed forms, and probe the frequency law")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration file (line-oriented `section.key = value`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir` from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the random-vector checks, recorded in every report.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the projector pair and emit the matrices as CSV.
    Build,
    /// Run the full verification report.
    Verify,
    /// Compare per-mode projector blocks against the closed form.
    Oracle,
    /// Evolve projected data and measure per-mode frequency ratios.
    Evolve,
    /// Defects at M and 2M with fitted convergence orders.
    Converge,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match &cli.config {
        None => String::new(),
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(1);
            }
        },
    };
    let cfg = match config::parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.out_dir));
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let result: Result<(), CliError> = match cli.command {
        Command::Build => commands::run_build(&cfg, &out_dir, seed),
        Command::Verify => commands::run_verify(&cfg, &out_dir, seed),
        Command::Oracle => commands::run_oracle(&cfg, &out_dir, seed),
        Command::Evolve => commands::run_evolve(&cfg, &out_dir, seed),
        Command::Converge => commands::run_converge(&cfg, &out_dir, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
