//! `qnute`: pricing runs, fidelity sweeps and Hamiltonian dumps.

mod commands;
mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, info};

use crate::config::RunConfig;
use crate::error::AppError;

#[derive(Debug, Parser)]
#[command(name = "qnute", version, about = "Black-Scholes pricing with a QNUTE simulator")]
struct Cli {
    /// Run configuration (`key = value` lines); defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; QNUTE_OUT takes precedence.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Reserved; every run is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Price one contract; writes prices.csv and trajectory.csv.
    Price,
    /// Mean step fidelity over every (option, n, D); writes fidelity.csv.
    FidelitySweep,
    /// Pauli decomposition of the generator; writes the term list and a dense CSV.
    Decompose,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, AppError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| AppError::Usage(format!("{}: {e}", p.display())))?;
            Ok(RunConfig::parse(&text)?)
        }
    }
}

fn output_dir(cli: &Cli, cfg: &RunConfig) -> PathBuf {
    std::env::var_os("QNUTE_OUT")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or_else(|| cli.out.clone())
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, AppError> {
    let cfg = load_config(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        info!("--seed {seed} has no effect; the pipeline is deterministic");
    }
    let out = output_dir(cli, &cfg);
    match cli.command {
        Command::Price => commands::price(&cfg, &out),
        Command::Decompose => commands::decompose(&cfg, &out),
        Command::FidelitySweep => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.threads.unwrap_or(0))
                .build()
                .map_err(|e| AppError::Usage(format!("--threads: {e}")))?;
            pool.install(|| commands::fidelity_sweep(&cfg, &out))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for f in files {
                info!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
