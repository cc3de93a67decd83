//! Batch harness: seeded ensembles, trace persistence, replay verification,
//! ensemble statistics and plot-ready CSV output.
//!
//! Output directory layout written by [`cmd_run`] and read by [`cmd_analyze`]:
//!
//! | file               | contents                                              |
//! |--------------------|-------------------------------------------------------|
//! | `config.json`      | resolved [`ExperimentConfig`]                         |
//! | `trace.csv`        | `trial,step,setting_rad,outcome`                      |
//! | `trajectories.csv` | `trial,step,mle_deg` (estimate after each step)       |
//! | `histogram.csv`    | `bin_index,lower,upper,observed,expected`             |
//! | `density.csv`      | `z,density` samples of the N(0, 1) density            |
//! | `consistency.csv`  | `n,median_abs_error_deg,rmse_deg`                     |
//! | `summary.json`     | [`EnsembleSummary`]                                   |

mod analysis;
mod config;
mod replay;
mod report;
mod run;

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::estimator::EstimatorError;
use crate::source::TraceError;
use crate::stats::StatsError;

pub use analysis::{
    analyze_trajectories, cmd_analyze, consistency_table, write_analysis_outputs, ConsistencyRow,
    EnsembleSummary, Provenance,
};
pub use config::{ExperimentConfig, InitialGuess};
pub use replay::{cmd_replay, read_trajectories_csv, replay_trace, replay_trial, ReplayReport};
pub use report::{cmd_report, read_summary, write_report, REPORT_HEADER};
pub use run::{cmd_run, run_ensemble, run_trial, write_run_outputs};

pub const CONFIG_FILE: &str = "config.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const TRAJECTORIES_FILE: &str = "trajectories.csv";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const DENSITY_FILE: &str = "density.csv";
pub const CONSISTENCY_FILE: &str = "consistency.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// Version tag recorded in every summary.
pub const CODE_VERSION: &str = concat!("aqse-core ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("replay divergence in trial {trial} at step {step}: {detail}")]
    Divergence {
        trial: u64,
        step: u64,
        detail: String,
    },
    #[error("{0}")]
    Inconsistent(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error("no summaries to report")]
    EmptyReport,
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        HarnessError::Io {
            path: path.to_owned(),
            source,
        }
    }
}
