//! Adaptive maximum-likelihood estimation on a discretized parameter circle.
//!
//! Each photon is measured with the POVM optimal at the latest estimate, the
//! log-likelihood over a uniform grid of `[0, pi/2)` is incremented by the log
//! probability of the observed outcome, and the next estimate is the grid
//! argmax.
//!
//! On a uniform grid the increment at grid point `k` for a setting at grid
//! point `j` depends only on `(k - j) mod G`, so the per-outcome log
//! probabilities are tabulated once ([`LogTables`]) and each update is two
//! contiguous slice additions under a circular shift.

use std::sync::Arc;

use thiserror::Error;

use crate::model::{probability_one_at_offset, AngleRad, Outcome, PERIOD};
use crate::source::{OutcomeSource, SourceError};

pub const DEFAULT_GRID_SIZE: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("grid size must be at least 2, got {0}")]
    GridTooSmall(usize),
    #[error("number of photons must be at least 1")]
    NoPhotons,
    #[error("log-likelihood is -inf at every grid point")]
    NoFiniteEntry,
    #[error(transparent)]
    Source(#[from] SourceError),
}

/// Circularly indexed log-probability tables, one per outcome.
///
/// `shifted[x][m] = ln p(x; theta_k, theta_j)` for `m = (k - j) mod G`.
#[derive(Debug, Clone)]
pub struct LogTables {
    step: f64,
    shifted: [Vec<f64>; 2],
}

impl LogTables {
    pub fn new(grid_size: usize) -> Result<Self, EstimatorError> {
        if grid_size < 2 {
            return Err(EstimatorError::GridTooSmall(grid_size));
        }
        let step = PERIOD / grid_size as f64;
        let mut one = Vec::with_capacity(grid_size);
        let mut two = Vec::with_capacity(grid_size);
        for m in 0..grid_size {
            // setting minus grid point
            let p1 = probability_one_at_offset(-(m as f64) * step);
            one.push(p1.ln());
            two.push((1.0 - p1).ln());
        }
        Ok(LogTables {
            step,
            shifted: [one, two],
        })
    }

    pub fn grid_size(&self) -> usize {
        self.shifted[0].len()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    fn table(&self, outcome: Outcome) -> &[f64] {
        match outcome {
            Outcome::One => &self.shifted[0],
            Outcome::Two => &self.shifted[1],
        }
    }
}

/// Accumulated log-likelihood over the grid `theta_k = k * (pi/2) / G`.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodGrid {
    values: Vec<f64>,
    step: f64,
}

impl LikelihoodGrid {
    pub fn zeros(grid_size: usize) -> Result<Self, EstimatorError> {
        if grid_size < 2 {
            return Err(EstimatorError::GridTooSmall(grid_size));
        }
        Ok(LikelihoodGrid {
            values: vec![0.0; grid_size],
            step: PERIOD / grid_size as f64,
        })
    }

    /// Wraps precomputed values, e.g. for inspecting argmax behaviour.
    pub fn from_values(values: Vec<f64>) -> Result<Self, EstimatorError> {
        let mut grid = LikelihoodGrid::zeros(values.len())?;
        grid.values = values;
        Ok(grid)
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn point(&self, index: usize) -> AngleRad {
        AngleRad::new(index as f64 * self.step)
    }

    pub fn nearest_index(&self, angle: AngleRad) -> usize {
        let k = (angle.value() / self.step).round() as usize;
        k % self.grid_size()
    }

    fn add_shifted(&mut self, table: &[f64], setting_index: usize) {
        let g = self.values.len();
        let split = g - setting_index;
        let (head, tail) = self.values.split_at_mut(setting_index);
        for (v, t) in tail.iter_mut().zip(&table[..split]) {
            *v += *t;
        }
        for (v, t) in head.iter_mut().zip(&table[split..]) {
            *v += *t;
        }
    }

    /// Grid argmax. Exact ties go to the point circularly closest to
    /// `previous`, then to the smallest index. `-inf` entries never win.
    pub fn argmax(&self, previous: usize) -> Result<usize, EstimatorError> {
        let best = max_value(&self.values);
        if best == f64::NEG_INFINITY {
            return Err(EstimatorError::NoFiniteEntry);
        }
        let g = self.values.len();
        let mut chosen = usize::MAX;
        let mut chosen_distance = usize::MAX;
        for (k, _) in self.values.iter().enumerate().filter(|(_, v)| **v == best) {
            let raw = k.abs_diff(previous);
            let distance = raw.min(g - raw);
            if distance < chosen_distance {
                chosen = k;
                chosen_distance = distance;
            }
        }
        Ok(chosen)
    }
}

fn max_value(values: &[f64]) -> f64 {
    const LANES: usize = 8;
    let mut lanes = [f64::NEG_INFINITY; LANES];
    let chunks = values.chunks_exact(LANES);
    let rest = chunks.remainder();
    for chunk in chunks {
        for (lane, v) in lanes.iter_mut().zip(chunk) {
            *lane = if *v > *lane { *v } else { *lane };
        }
    }
    let mut best = lanes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for v in rest {
        if *v > best {
            best = *v;
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct EstimatorState {
    grid: LikelihoodGrid,
    tables: Arc<LogTables>,
    current: usize,
    initial: usize,
    step_count: usize,
}

/// Fresh estimator with `l_0 = 0` and the estimate at the grid point nearest `initial_guess`.
pub fn init(grid_size: usize, initial_guess: AngleRad) -> Result<EstimatorState, EstimatorError> {
    let tables = Arc::new(LogTables::new(grid_size)?);
    Ok(EstimatorState::with_tables(tables, initial_guess))
}

impl EstimatorState {
    /// Reuses tables shared across trials.
    pub fn with_tables(tables: Arc<LogTables>, initial_guess: AngleRad) -> Self {
        let grid = LikelihoodGrid {
            values: vec![0.0; tables.grid_size()],
            step: tables.step(),
        };
        let initial = grid.nearest_index(initial_guess);
        EstimatorState {
            grid,
            tables,
            current: initial,
            initial,
            step_count: 0,
        }
    }

    /// Add the log-likelihood of `outcome` observed with the POVM at the
    /// current estimate, then move the estimate to the new argmax.
    pub fn update(&mut self, outcome: Outcome) -> Result<AngleRad, EstimatorError> {
        let table = self.tables.table(outcome);
        self.grid.add_shifted(table, self.current);
        self.step_count += 1;
        self.current = self.grid.argmax(self.current)?;
        Ok(self.mle())
    }

    /// Latest maximum-likelihood estimate (the initial guess before any update).
    pub fn mle(&self) -> AngleRad {
        self.grid.point(self.current)
    }

    pub fn mle_index(&self) -> usize {
        self.current
    }

    pub fn initial_guess(&self) -> AngleRad {
        self.grid.point(self.initial)
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn grid(&self) -> &LikelihoodGrid {
        &self.grid
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryStep {
    pub setting: AngleRad,
    pub outcome: Outcome,
    pub mle_after: AngleRad,
}

/// One adaptive run. `true_value` is known to the harness only.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub true_value: AngleRad,
    pub steps: Vec<TrajectoryStep>,
    pub seed: Option<u64>,
}

impl Trajectory {
    pub fn final_mle(&self) -> Option<AngleRad> {
        self.steps.last().map(|s| s.mle_after)
    }

    /// Estimate after `n` photons, `n >= 1`.
    pub fn mle_after(&self, n: usize) -> Option<AngleRad> {
        n.checked_sub(1)
            .and_then(|i| self.steps.get(i))
            .map(|s| s.mle_after)
    }

    pub fn is_adaptive(&self) -> bool {
        self.steps
            .windows(2)
            .all(|w| w[1].setting == w[0].mle_after)
    }
}

/// Run `photons` adaptive steps, drawing each outcome from `source` with the
/// POVM set at the previous estimate.
pub fn run_sequence<S: OutcomeSource + ?Sized>(
    tables: &Arc<LogTables>,
    theta_true: AngleRad,
    photons: usize,
    initial_guess: AngleRad,
    source: &mut S,
) -> Result<Trajectory, EstimatorError> {
    if photons == 0 {
        return Err(EstimatorError::NoPhotons);
    }
    let mut state = EstimatorState::with_tables(Arc::clone(tables), initial_guess);
    let mut steps = Vec::with_capacity(photons);
    for _ in 0..photons {
        let setting = state.mle();
        let outcome = source.draw(theta_true, setting)?;
        let mle_after = state.update(outcome)?;
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
