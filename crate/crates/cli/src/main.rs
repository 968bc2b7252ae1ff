//! `ajm`: batch driver for sweeps and joint-measurability checks.
//!
//! Each subcommand reads a JSON configuration and writes
//! `<out>/<command>.csv` and `<out>/<command>.json`. Exit codes: 0 on
//! success, 2 on configuration errors, 3 on numerical failures.

mod commands;
mod config;
mod error;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::commands::Output;
use crate::error::{config_err, CliResult};
use crate::report::{write_outputs, Report, VERSION};

#[derive(Parser)]
#[command(name = "ajm", version = VERSION, about = "Approximate joint measurement sweeps and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Monte Carlo seed; overrides the configuration (three-sweep only).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Two-detector marginal unsharpness over a width sweep.
    SweepAprime(Common),
    /// Outcome probabilities and post-measurement states.
    PostState(Common),
    /// Spin-direction fidelities for width pairs.
    Fidelities(Common),
    /// Outcome probabilities for obliquely read pointers.
    Oblique(Common),
    /// Three-detector marginals by Monte Carlo.
    ThreeSweep(Common),
    /// Fermat-Toricelli condition for three directions.
    FtCheck(Common),
    /// Validity verdicts for explicit joint observables.
    JmCheck(Common),
}

fn emit<C: Serialize, R: Serialize>(name: &str, common: &Common, cfg: &C, out: Output<R>) -> CliResult<()> {
    let report = Report { command: name, version: VERSION, config: cfg, tolerances: out.tolerances.into_iter().collect(), results: out.results };
    let (csv, json) = write_outputs(&common.out, &report, &out.table)?;
    println!("{}", csv.display());
    println!("{}", json.display());
    Ok(())
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    config::load(path)
}

fn run(cli: Cli) -> CliResult<()> {
    let (name, common) = match &cli.command {
        Command::SweepAprime(c) => ("sweep-aprime", c),
        Command::PostState(c) => ("post-state", c),
        Command::Fidelities(c) => ("fidelities", c),
        Command::Oblique(c) => ("oblique", c),
        Command::ThreeSweep(c) => ("three-sweep", c),
        Command::FtCheck(c) => ("ft-check", c),
        Command::JmCheck(c) => ("jm-check", c),
    };
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(config_err("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| config_err(format!("thread pool: {e}")))?;
    }
    let path = &common.config;
    match &cli.command {
        Command::SweepAprime(_) => {
            let cfg: config::SweepAprimeConfig = load(path)?;
            emit(name, common, &cfg, commands::sweep_aprime(&cfg)?)
        }
        Command::PostState(_) => {
            let cfg: config::PostStateConfig = load(path)?;
            emit(name, common, &cfg, commands::post_state_cmd(&cfg)?)
        }
        Command::Fidelities(_) => {
            let cfg: config::FidelitiesConfig = load(path)?;
            emit(name, common, &cfg, commands::fidelities(&cfg)?)
        }
        Command::Oblique(_) => {
            let cfg: config::ObliqueConfig = load(path)?;
            emit(name, common, &cfg, commands::oblique(&cfg)?)
        }
        Command::ThreeSweep(_) => {
            let mut cfg: config::ThreeSweepConfig = load(path)?;
            if common.seed.is_some() {
                cfg.seed = common.seed;
            }
            emit(name, common, &cfg, commands::three_sweep(&cfg)?)
        }
        Command::FtCheck(_) => {
            let cfg: config::FtCheckConfig = load(path)?;
            emit(name, common, &cfg, commands::ft_check(&cfg)?)
        }
        Command::JmCheck(_) => {
            let cfg: config::JmCheckConfig = load(path)?;
            emit(name, common, &cfg, commands::jm_check(&cfg)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ajm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
