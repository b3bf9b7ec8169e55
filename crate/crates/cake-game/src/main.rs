use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cake_game::config::{RunConfig, SweepConfig};
use cake_game::runner::{self, RunnerError};
use cake_game::valuation::Valuation;

#[derive(Parser)]
#[command(name = "cake-game", version, about = "Repeated cake-cutting simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured game and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a grid of games over horizons, instances, and seeds.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute regrets and spiral diagnostics from a stored trajectory.
    Analyze {
        #[arg(long)]
        trajectory: PathBuf,
        /// Path to Bob's valuation JSON file.
        #[arg(long)]
        vb: PathBuf,
        /// Path to Alice's valuation JSON file; enables Stackelberg regret.
        #[arg(long)]
        va: Option<PathBuf>,
    },
}

fn load_valuation(path: &PathBuf) -> Result<Valuation, RunnerError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunnerError::BadInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| RunnerError::BadInput(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<ExitCode, RunnerError> {
    match cli.command {
        Command::Run { config } => {
            let cfg = RunConfig::from_path(&config)?;
            let artifacts = runner::execute_run(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&artifacts.summary)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { config } => {
            let cfg = SweepConfig::from_path(&config)?;
            let outcome = runner::execute_sweep(&cfg)?;
            match &outcome.csv_path {
                Some(p) => eprintln!("{} rows -> {}", outcome.rows.len(), p.display()),
                None => eprintln!("{} rows (no output file configured)", outcome.rows.len()),
            }
            if outcome.violations.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                for v in &outcome.violations {
                    eprintln!("bound violation: {v}");
                }
                Ok(ExitCode::from(3))
            }
        }
        Command::Analyze { trajectory, vb, va } => {
            let v_bob = load_valuation(&vb)?;
            let v_alice = va.as_ref().map(load_valuation).transpose()?;
            let report = runner::analyze_trajectory(&trajectory, &v_bob, v_alice.as_ref())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
