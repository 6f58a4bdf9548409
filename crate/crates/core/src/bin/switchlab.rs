use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use switchdiff::cli::{run_scenario, ScenarioConfig, Task};

#[derive(Parser)]
#[command(name = "switchlab", version, about = "Switching-diffusion population models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Principal eigenvalue of the linearization at zero.
    Eigen(Common),
    /// Integrate until the residual drops below the tolerance.
    Steady(Common),
    /// Integrate to t_max and log component statistics.
    Simulate(Common),
    /// Locate the threshold named in the config.
    Threshold(Common),
    /// Long-time outcomes across the values listed in the config.
    Sweep(Common),
    /// Run the verification battery.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Eigen(a) => ("eigen", a),
        Command::Steady(a) => ("steady", a),
        Command::Simulate(a) => ("simulate", a),
        Command::Threshold(a) => ("threshold", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Verify(a) => ("verify", a),
    };
    let mut config = match ScenarioConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("switchlab: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if config.task.as_str() != kind {
        config.task = match kind {
            "eigen" => Task::Eigen,
            "steady" => Task::Steady,
            "simulate" => Task::Simulate,
            "verify" => Task::Verify { criteria: Vec::new() },
            _ => {
                eprintln!("switchlab: config task is '{}', not '{kind}'", config.task.as_str());
                return ExitCode::from(2);
            }
        };
    }
    if let Some(out) = args.out {
        config.output = out;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let run = run_scenario(&config);
    if let Ok(text) = std::fs::read_to_string(&run.report) {
        print!("{text}");
    }
    ExitCode::from(run.exit_code as u8)
}
