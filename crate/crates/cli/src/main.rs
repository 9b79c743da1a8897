//! `sarx`: simulate switched ARX data, identify it online, run experiment
//! grids and evaluate the convergence theory, all from one TOML config.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Overrides;
use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "sarx", version, about = "Online switched ARX identification")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Overrides `experiment.base_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides `output.dir`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for parallel realizations.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a trajectory and write `trajectory.csv`.
    Simulate { config: PathBuf },
    /// Identify a trajectory; writes `records.csv`, `summary.json` and optionally `bound_trace.csv`.
    Identify {
        config: PathBuf,
        /// Read the trajectory from this CSV instead of simulating it.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Run the realization grid; writes `summary.csv` and `realizations.json`.
    Experiment { config: PathBuf },
    /// Evaluate convergence constants; writes `theory.json` and `curve.csv`.
    Theory { config: PathBuf },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    let flags = Overrides {
        seed: cli.seed,
        output: cli.output,
    };
    match cli.command {
        Command::Simulate { config } => commands::simulate_cmd(&RunConfig::load(&config)?, &flags),
        Command::Identify { config, trajectory } => {
            commands::identify_cmd(&RunConfig::load(&config)?, &flags, trajectory.as_deref())
        }
        Command::Experiment { config } => {
            commands::experiment_cmd(&RunConfig::load(&config)?, &flags)
        }
        Command::Theory { config } => commands::theory_cmd(&RunConfig::load(&config)?, &flags),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
