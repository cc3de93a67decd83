//! Where outcomes come from: a seeded Bernoulli simulator of the detector
//! pair, or a cursor over a recorded trace.

mod trace;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{probability_one, AngleRad, Outcome};

pub use trace::{
    format_setting, read_trace, read_trace_from, Trace, TraceError, TraceRecord, TraceWriter,
    TRACE_HEADER,
};

/// Maximum wrapped difference between a recorded and a recomputed setting.
pub const REPLAY_SETTING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SourceError {
    #[error("trace for trial {trial} exhausted at step {step}")]
    Exhausted { trial: u64, step: u64 },
    #[error(
        "replay diverged in trial {trial} at step {step}: recorded setting {recorded} rad, estimator chose {expected} rad"
    )]
    Divergence {
        trial: u64,
        step: u64,
        recorded: f64,
        expected: f64,
    },
}

pub trait OutcomeSource {
    /// Outcome of measuring one photon prepared at `theta_true` with the POVM set at `setting`.
    fn draw(&mut self, theta_true: AngleRad, setting: AngleRad) -> Result<Outcome, SourceError>;
}

/// Bernoulli realization: outcome 1 with probability `p(1; theta_true, setting)`.
pub fn simulated_draw<R: Rng + ?Sized>(
    theta_true: AngleRad,
    setting: AngleRad,
    rng: &mut R,
) -> Outcome {
    let u: f64 = rng.random();
    if u < probability_one(theta_true, setting) {
        Outcome::One
    } else {
        Outcome::Two
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` in an ensemble seeded with `master_seed`:
/// `splitmix64(master_seed + (trial + 1) * 0x9E3779B97F4A7C15)` in wrapping
/// `u64` arithmetic. Part of the trace format contract; do not change.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(trial.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Ideal detector pair driven by a ChaCha8 stream.
#[derive(Debug, Clone)]
pub struct SimulatedSource {
    rng: ChaCha8Rng,
}

impl SimulatedSource {
    pub fn from_seed(seed: u64) -> Self {
        SimulatedSource {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn for_trial(master_seed: u64, trial: u64) -> Self {
        SimulatedSource::from_seed(trial_seed(master_seed, trial))
    }

    /// Uniform grid index in `0..grid_size`, drawn from this trial's stream.
    pub fn random_grid_index(&mut self, grid_size: usize) -> usize {
        self.rng.random_range(0..grid_size)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl OutcomeSource for SimulatedSource {
    fn draw(&mut self, theta_true: AngleRad, setting: AngleRad) -> Result<Outcome, SourceError> {
        Ok(simulated_draw(theta_true, setting, &mut self.rng))
    }
}

/// Replays one trial's recorded outcomes, checking that the estimator asks
/// for the same settings that were recorded.
#[derive(Debug, Clone)]
pub struct ReplayCursor {
    trial: u64,
    records: Vec<TraceRecord>,
    position: usize,
}

impl ReplayCursor {
    /// `records` must be this trial's records in step order.
    pub fn new(trial: u64, records: Vec<TraceRecord>) -> Self {
        ReplayCursor {
            trial,
            records,
            position: 0,
        }
    }

    pub fn remaining(&self) -> usize {
        self.records.len() - self.position
    }

    pub fn replay_draw(&mut self, expected_setting: AngleRad) -> Result<Outcome, SourceError> {
        let step = self.position as u64;
        let record = self
            .records
            .get(self.position)
            .ok_or(SourceError::Exhausted {
                trial: self.trial,
                step,
            })?;
        if record.setting.deviation_from(expected_setting).abs() > REPLAY_SETTING_TOLERANCE {
            return Err(SourceError::Divergence {
                trial: self.trial,
                step,
                recorded: record.setting.value(),
                expected: expected_setting.value(),
            });
        }
        self.position += 1;
        Ok(record.outcome)
    }
}

impl OutcomeSource for ReplayCursor {
    fn draw(&mut self, _theta_true: AngleRad, setting: AngleRad) -> Result<Outcome, SourceError> {
        self.replay_draw(setting)
    }
}
