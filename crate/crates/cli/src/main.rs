use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qwshrink::runner::{run_experiment, verify, write_atomic, ExperimentConfig, RunError};

/// Wavelet shrinkage experiments realized with quantum channels.
#[derive(Debug, Parser)]
#[command(name = "qwshrink", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config and write its artifacts.
    Run {
        config: PathBuf,
        /// Directory for this run's artifacts (default: runs/<figure>).
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Run the built-in invariant suite and print a pass/fail table.
    Verify {
        /// Corrupt one Kraus operator so the completeness check must fail.
        #[arg(long)]
        inject_fault: bool,
    },
}

fn run(config: PathBuf, output_dir: Option<PathBuf>, seed: Option<u64>, shots: Option<u64>) -> Result<(), RunError> {
    let text = std::fs::read_to_string(&config)
        .map_err(|e| RunError::Config(format!("cannot read {}: {e}", config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if shots.is_some() {
        cfg.shots = shots;
    }
    let dir = output_dir
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("runs").join(cfg.figure.as_str()));
    let out = run_experiment(&cfg)?;
    write_atomic(&dir, &out.files)?;
    println!("{}: wrote {} files to {}", cfg.figure.as_str(), out.files.len(), dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, output_dir, seed, shots } => match run(config, output_dir, seed, shots) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Verify { inject_fault } => {
            let report = verify(inject_fault);
            print!("{}", report.table());
            match report.first_failure() {
                None => ExitCode::SUCCESS,
                Some(c) => {
                    eprintln!("error: invariant violated: {}", c.name);
                    ExitCode::from(1)
                }
            }
        }
    }
}
