//! Adaptive quantum state estimation of a one-parameter qubit family.
//!
//! - [`model`]: states, the optimal POVM, outcome probabilities, Fisher information.
//! - [`estimator`]: the grid maximum-likelihood estimator that picks each next setting.
//! - [`source`]: simulated and recorded outcome streams, trace CSV I/O.
//! - [`stats`]: goodness-of-fit and confidence intervals for ensembles.
//! - [`harness`]: seeded ensembles, replay, analysis and report files.

pub mod estimator;
pub mod harness;
pub mod model;
pub mod source;
pub mod stats;

pub use estimator::{
    EstimatorError, EstimatorState, LikelihoodGrid, LogTables, Trajectory, TrajectoryStep,
};
pub use harness::{EnsembleSummary, ExperimentConfig, HarnessError, InitialGuess};
pub use model::{AngleRad, ModelError, Outcome};
pub use source::{OutcomeSource, SimulatedSource, SourceError, TraceRecord};
pub use stats::{ConfidenceInterval, GofResult, StandardizedSample, StatsError};
