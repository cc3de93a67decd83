use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use aqse_core::harness::{cmd_analyze, cmd_replay, cmd_report, cmd_run, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "aqse",
    version,
    about = "Adaptive qubit phase estimation: simulate, verify, analyze"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded ensemble of adaptive sequences and write traces.
    Run(RunArgs),
    /// Replay the traces in a run directory and compute the ensemble statistics.
    Analyze {
        #[arg(long = "in", value_name = "DIR")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.10)]
        significance: f64,
        #[arg(long, default_value_t = 0.90)]
        ci: f64,
    },
    /// Check a trace file against the estimator.
    Replay {
        #[arg(long)]
        trace: PathBuf,
    },
    /// Tabulate one or more summary.json files.
    Report {
        #[arg(required = true, value_name = "SUMMARY")]
        summaries: Vec<PathBuf>,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "theta-true", value_name = "DEG", allow_hyphen_values = true)]
    theta_true: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

impl RunArgs {
    fn resolve(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.theta_true {
            cfg.theta_true_deg = v;
        }
        if let Some(v) = self.n {
            cfg.n_photons = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.grid {
            cfg.grid_size = v;
        }
        if let Some(v) = self.seed {
            cfg.master_seed = v;
        }
        if let Some(v) = self.out {
            cfg.output_dir = v;
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        Ok(cfg.validated()?)
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let trajectories = cmd_run(&cfg).context("run failed")?;
            let steps: usize = trajectories.iter().map(|t| t.steps.len()).sum();
            println!(
                "wrote {} trials, {steps} steps to {}",
                trajectories.len(),
                cfg.output_dir.display()
            );
        }
        Command::Analyze {
            input,
            significance,
            ci,
        } => {
            let s = cmd_analyze(&input, significance, ci).context("analysis failed")?;
            println!(
                "theta_true = {:.4} deg, n = {}, r = {}",
                s.theta_true_deg, s.n_photons, s.trials
            );
            println!(
                "mu = {:.4} +- {:.4} deg ({:.0}% CL)",
                s.mu_deg,
                s.mu_halfwidth_deg,
                100.0 * ci
            );
            println!(
                "v in [{:.4}, {:.4}] rad^2",
                s.variance_ci.lower, s.variance_ci.upper
            );
            println!(
                "X2 = {:.3} on {} dof, critical {:.3}: {}",
                s.x2,
                s.dof,
                s.gof.critical_value,
                if s.accept { "accept" } else { "reject" }
            );
        }
        Command::Replay { trace } => {
            let report = cmd_replay(&trace)?;
            println!("{report}");
        }
        Command::Report { summaries, out } => {
            let table = cmd_report(&summaries, out.as_deref())?;
            if out.is_none() {
                print!("{table}");
            }
        }
    }
    Ok(())
}
