use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gossipq::harness::config::{Command, ExperimentConfig};
use gossipq::harness::experiment::run_experiment;
use gossipq::harness::output::write_report;

#[derive(Parser)]
#[command(name = "gossipq", version, about = "Gossip quantile and trimmed-mean experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Quantile or median estimation, all configured algorithms.
    Simulate(Common),
    /// Adaptive trimmed mean with quantile and rank weights.
    Trim(Common),
    /// Decentralized depth, depth quantile and depth-trimmed mean.
    Depth(Common),
    /// Multivariate geometric median.
    Geomed(Common),
    /// Spectral gap identity on every small connected graph.
    Spectral(Common),
    /// Monte-Carlo check of the rank concentration bounds.
    Bounds(Common),
    /// Robust regression by gradient trimming.
    Regress(Common),
    /// Asynchronous against synchronous updates per graph use.
    SyncCompare(Common),
}

#[derive(Args)]
struct Common {
    /// JSON file merged over the subcommand defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Edge activations per trial.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Also write an SVG plot of the mean curves.
    #[arg(long)]
    svg: bool,
}

impl Sub {
    fn split(self) -> (Command, Common) {
        match self {
            Sub::Simulate(c) => (Command::Simulate, c),
            Sub::Trim(c) => (Command::Trim, c),
            Sub::Depth(c) => (Command::Depth, c),
            Sub::Geomed(c) => (Command::Geomed, c),
            Sub::Spectral(c) => (Command::Spectral, c),
            Sub::Bounds(c) => (Command::Bounds, c),
            Sub::Regress(c) => (Command::Regress, c),
            Sub::SyncCompare(c) => (Command::SyncCompare, c),
        }
    }
}

fn load(cmd: Command, args: &Common) -> Result<ExperimentConfig, String> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            ExperimentConfig::from_json(cmd, &text).map_err(|e| e.to_string())?
        }
        None => ExperimentConfig::for_command(cmd),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(b) = args.budget {
        cfg.budget = b;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let (cmd, args) = Cli::parse().command.split();
    let cfg = match load(cmd, &args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run_experiment(cmd, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match write_report(&report, &cfg, &args.out, args.svg) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    for s in &report.series {
        if !s.checkpoints.is_empty() {
            println!("{:<28} final {:.6e}", s.name, s.last_mean());
        }
    }
    if report.violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        ExitCode::from(3)
    }
}
