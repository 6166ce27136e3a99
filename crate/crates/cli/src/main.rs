//! `wwlab`: decay, recovery and fidelity experiments from a TOML config.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{ExperimentConfig, Format};
use output::Destination;

/// Exit status when `--strict` is set and a tolerance check fails.
const EXIT_STRICT: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "wwlab",
    version,
    about = "Spontaneous decay and photon recovery laboratory"
)]
struct Cli {
    /// Experiment config (TOML); the built-in Lorentzian default when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Exit with status 3 when a tolerance check fails.
    #[arg(long, global = true)]
    strict: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Volterra time step, overriding the config.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Number of oracle modes, overriding the config.
    #[arg(long, global = true)]
    oracle_n: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fidelity and error figures for one model.
    Report,
    /// Survival amplitude from the Volterra solver next to the exact oracle.
    Survival,
    /// Brute-force recovery, optimal versus baseline packet and the
    /// time-reversal protocol trace.
    Recover,
    /// Report rows over a parameter sweep.
    Sweep,
}

/// Outcome of a command: whether every tolerance check held.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Breach(Vec<String>),
}

fn resolve(cli: &Cli) -> Result<(ExperimentConfig, Destination)> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default_config(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(dt) = cli.dt {
        config.time.dt = Some(dt);
    }
    if let Some(n) = cli.oracle_n {
        config.oracle.modes = n;
    }
    config.validate()?;
    let dest = Destination {
        path: cli.out.clone().or_else(|| config.output.path.clone()),
        format: cli.format.unwrap_or(config.output.format),
    };
    Ok((config, dest))
}

fn run(cli: &Cli) -> Result<Verdict> {
    let (config, dest) = resolve(cli)?;
    match cli.command {
        Command::Report => commands::report::run(&config, &dest),
        Command::Survival => commands::survival::run(&config, &dest),
        Command::Recover => commands::recover::run(&config, &dest),
        Command::Sweep => commands::sweep::run(&config, &dest),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Breach(reasons)) => {
            for r in &reasons {
                log::warn!("tolerance check failed: {r}");
            }
            if cli.strict {
                for r in &reasons {
                    eprintln!("strict: {r}");
                }
                ExitCode::from(EXIT_STRICT)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
