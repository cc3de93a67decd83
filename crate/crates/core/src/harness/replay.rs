use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use super::{ExperimentConfig, HarnessError, CONFIG_FILE, TRAJECTORIES_FILE};
use crate::estimator::{
    EstimatorError, EstimatorState, LogTables, Trajectory, TrajectoryStep, DEFAULT_GRID_SIZE,
};
use crate::model::AngleRad;
use crate::source::{read_trace, ReplayCursor, SourceError, Trace, TraceRecord};

/// Re-runs the estimator on one trial's recorded outcomes.
///
/// The initial guess is the recorded setting of step 0. A recorded setting at
/// step `i` that differs from the recomputed estimate is reported as a
/// divergence at step `i - 1`, the step whose estimate disagrees. When
/// `reference_mle_deg` is given (one estimate per step, in degrees), every
/// recomputed estimate is also compared with it at grid resolution, which
/// catches a changed final outcome too.
pub fn replay_trial(
    trial: u64,
    records: &[TraceRecord],
    tables: &Arc<LogTables>,
    theta_true: AngleRad,
    reference_mle_deg: Option<&[f64]>,
) -> Result<Trajectory, HarnessError> {
    let first = records
        .first()
        .ok_or(EstimatorError::Source(SourceError::Exhausted {
            trial,
            step: 0,
        }))?;
    let mut state = EstimatorState::with_tables(Arc::clone(tables), first.setting);
    let mut cursor = ReplayCursor::new(trial, records.to_vec());
    let mut steps = Vec::with_capacity(records.len());
    for i in 0..records.len() {
        let setting = state.mle();
        let outcome = match cursor.replay_draw(setting) {
            Ok(outcome) => outcome,
            Err(SourceError::Divergence {
                step,
                recorded,
                expected,
                ..
            }) => {
                return Err(HarnessError::Divergence {
                    trial,
                    step: step.saturating_sub(1),
                    detail: format!(
                        "recomputed estimate {expected:.10} rad, but step {step} was recorded with setting {recorded:.10} rad"
                    ),
                })
            }
            Err(e) => return Err(EstimatorError::from(e).into()),
        };
        let mle_after = state.update(outcome)?;
        if let Some(&deg) = reference_mle_deg.and_then(|r| r.get(i)) {
            let recorded = state.grid().nearest_index(AngleRad::from_degrees(deg));
            if recorded != state.mle_index() {
                return Err(HarnessError::Divergence {
                    trial,
                    step: i as u64,
                    detail: format!(
                        "recomputed estimate {:.4} deg, recorded {deg:.4} deg",
                        mle_after.degrees()
                    ),
                });
            }
        }
        steps.push(TrajectoryStep {
            setting,
            outcome,
            mle_after,
        });
    }
    Ok(Trajectory {
        true_value: theta_true,
        steps,
        seed: None,
    })
}

/// Replays every trial of `trace`, in parallel. On failure the error of the
/// lowest-numbered failing trial is returned.
pub fn replay_trace(
    trace: &Trace,
    grid_size: usize,
    theta_true: AngleRad,
    reference: Option<&BTreeMap<u64, Vec<f64>>>,
) -> Result<Vec<(u64, Trajectory)>, HarnessError> {
    let tables = Arc::new(LogTables::new(grid_size)?);
    let trials: Vec<(&u64, &Vec<TraceRecord>)> = trace.trials.iter().collect();
    let results: Vec<Result<(u64, Trajectory), HarnessError>> = trials
        .par_iter()
        .map(|(trial, records)| {
            let reference = reference.and_then(|r| r.get(*trial)).map(Vec::as_slice);
            replay_trial(**trial, records, &tables, theta_true, reference).map(|t| (**trial, t))
        })
        .collect();
    results.into_iter().collect()
}

/// Parses `trajectories.csv` into per-trial estimate lists (degrees).
pub fn read_trajectories_csv(path: &Path) -> Result<BTreeMap<u64, Vec<f64>>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let parse_err = |line: usize, message: String| HarnessError::Parse {
        path: path.to_owned(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "trial,step,mle_deg")) => {}
        _ => return Err(parse_err(1, "expected header `trial,step,mle_deg`".into())),
    }
    let mut out: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for (index, line) in lines {
        let line_no = index + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                line_no,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let trial: u64 = fields[0]
            .parse()
            .map_err(|e| parse_err(line_no, format!("trial: {e}")))?;
        let step: usize = fields[1]
            .parse()
            .map_err(|e| parse_err(line_no, format!("step: {e}")))?;
        let deg: f64 = fields[2]
            .parse()
            .map_err(|e| parse_err(line_no, format!("mle_deg: {e}")))?;
        let entries = out.entry(trial).or_default();
        if step != entries.len() {
            return Err(parse_err(
                line_no,
                format!("expected step {}, found {step}", entries.len()),
            ));
        }
        entries.push(deg);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplayReport {
    pub trials: usize,
    pub matched: usize,
    pub records: usize,
}

impl fmt::Display for ReplayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "match: {}/{} trials", self.matched, self.trials)
    }
}

/// Verifies a trace file against the estimator. Uses `config.json` and
/// `trajectories.csv` from the same directory when present.
pub fn cmd_replay(trace_path: &Path) -> Result<ReplayReport, HarnessError> {
    let trace = read_trace(trace_path)?;
    let dir = trace_path.parent().unwrap_or_else(|| Path::new("."));
    let config_path = dir.join(CONFIG_FILE);
    let config = if config_path.exists() {
        Some(ExperimentConfig::from_file(&config_path)?)
    } else {
        None
    };
    let grid_size = config.as_ref().map_or(DEFAULT_GRID_SIZE, |c| c.grid_size);
    let theta_true = config.as_ref().map_or(AngleRad::ZERO, |c| c.theta_true());

    if let Some(cfg) = &config {
        for (trial, records) in &trace.trials {
            if records.len() != cfg.n_photons {
                return Err(HarnessError::Inconsistent(format!(
                    "trial {trial} has {} records, config expects {}",
                    records.len(),
                    cfg.n_photons
                )));
            }
        }
    }

    let reference_path = dir.join(TRAJECTORIES_FILE);
    let reference = if reference_path.exists() {
        Some(read_trajectories_csv(&reference_path)?)
    } else {
        None
    };
    let replayed = replay_trace(&trace, grid_size, theta_true, reference.as_ref())?;
    Ok(ReplayReport {
        trials: trace.trials.len(),
        matched: replayed.len(),
        records: trace.record_count(),
    })
}
