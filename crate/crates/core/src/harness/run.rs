use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use super::config::{ExperimentConfig, InitialGuess};
use super::{HarnessError, CONFIG_FILE, TRACE_FILE, TRAJECTORIES_FILE};
use crate::estimator::{run_sequence, LogTables, Trajectory};
use crate::model::AngleRad;
use crate::source::{trial_seed, SimulatedSource, TraceRecord, TraceWriter};

/// One simulated trial. The initial guess, when random, is the first draw of
/// the trial's stream.
pub fn run_trial(
    config: &ExperimentConfig,
    tables: &Arc<LogTables>,
    trial: u64,
) -> Result<Trajectory, HarnessError> {
    let seed = trial_seed(config.master_seed, trial);
    let mut source = SimulatedSource::from_seed(seed);
    let initial = match config.initial_guess {
        InitialGuess::Random => {
            let k = source.random_grid_index(tables.grid_size());
            AngleRad::new(k as f64 * tables.step())
        }
        InitialGuess::FixedDeg(deg) => AngleRad::from_degrees(deg),
    };
    let mut trajectory = run_sequence(
        tables,
        config.theta_true(),
        config.n_photons,
        initial,
        &mut source,
    )?;
    trajectory.seed = Some(seed);
    Ok(trajectory)
}

/// Runs `config.trials` independent trials, in parallel over trials, and
/// returns them in trial order.
pub fn run_ensemble(config: &ExperimentConfig) -> Result<Vec<Trajectory>, HarnessError> {
    let config = config.clone().validated()?;
    let tables = Arc::new(LogTables::new(config.grid_size)?);
    let work = || {
        (0..config.trials as u64)
            .into_par_iter()
            .map(|trial| run_trial(&config, &tables, trial))
            .collect::<Result<Vec<_>, _>>()
    };
    match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::ThreadPool(e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| HarnessError::io(path, e))
}

/// Writes `config.json`, `trace.csv` and `trajectories.csv` into `dir`.
pub fn write_run_outputs(
    dir: &Path,
    config: &ExperimentConfig,
    trajectories: &[Trajectory],
) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;

    let config_path = dir.join(CONFIG_FILE);
    let mut text = serde_json::to_string_pretty(config).map_err(|source| HarnessError::Json {
        path: config_path.clone(),
        source,
    })?;
    text.push('\n');
    fs::write(&config_path, text).map_err(|e| HarnessError::io(&config_path, e))?;

    let mut trace = TraceWriter::create(&dir.join(TRACE_FILE))?;
    for (trial, trajectory) in trajectories.iter().enumerate() {
        for (step, s) in trajectory.steps.iter().enumerate() {
            trace.record(&TraceRecord {
                trial: trial as u64,
                step: step as u64,
                setting: s.setting,
                outcome: s.outcome,
            })?;
        }
        trace.finish_trial()?;
    }

    let path = dir.join(TRAJECTORIES_FILE);
    let mut out = create(&path)?;
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "trial,step,mle_deg")?;
        for (trial, trajectory) in trajectories.iter().enumerate() {
            for (step, s) in trajectory.steps.iter().enumerate() {
                writeln!(out, "{trial},{step},{:.4}", s.mle_after.degrees())?;
            }
        }
        out.flush()
    };
    write().map_err(|e| HarnessError::io(&path, e))
}

/// Validates `config`, runs the ensemble and writes the run files to `config.output_dir`.
pub fn cmd_run(config: &ExperimentConfig) -> Result<Vec<Trajectory>, HarnessError> {
    let config = config.clone().validated()?;
    let trajectories = run_ensemble(&config)?;
    write_run_outputs(&config.output_dir, &config, &trajectories)?;
    Ok(trajectories)
}
