use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    replay_trace, ExperimentConfig, HarnessError, CODE_VERSION, CONFIG_FILE, CONSISTENCY_FILE,
    DENSITY_FILE, HISTOGRAM_FILE, SUMMARY_FILE, TRACE_FILE,
};
use crate::estimator::Trajectory;
use crate::model::{wrapped_deviation, AngleRad, QUANTUM_FISHER_INFORMATION};
use crate::source::read_trace;
use crate::stats::{
    gof_test, mean_ci, normal_pdf, standardize, variance_ci, BinSpec, ConfidenceInterval, GofResult,
};

/// Photon counts at which the summary keeps a consistency row.
const SUMMARY_CHECKPOINTS: [usize; 6] = [1, 3, 10, 30, 100, 300];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub n: usize,
    pub median_abs_error_rad: f64,
    pub rmse_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: Option<ExperimentConfig>,
    pub master_seed: Option<u64>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub theta_true_deg: f64,
    pub n_photons: usize,
    pub trials: usize,
    /// Ensemble mean in degrees, represented next to `theta_true_deg`.
    pub mu_deg: f64,
    pub mu_halfwidth_deg: f64,
    /// Mean interval in degrees.
    pub mean_ci: ConfidenceInterval,
    /// Interval for the variance of `sqrt(n) (theta_hat - mu)`, in rad^2.
    pub variance_ci: ConfidenceInterval,
    pub gof: GofResult,
    pub x2: f64,
    pub dof: usize,
    pub accept: bool,
    pub rmse_table: Vec<ConsistencyRow>,
    pub provenance: Provenance,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Median absolute and RMS wrapped error against `theta_true` after every
/// photon count `1..=N`, where `N` is the shortest trajectory length.
pub fn consistency_table(trajectories: &[Trajectory], theta_true: AngleRad) -> Vec<ConsistencyRow> {
    let photons = trajectories
        .iter()
        .map(|t| t.steps.len())
        .min()
        .unwrap_or(0);
    (1..=photons)
        .map(|n| {
            let mut errors: Vec<f64> = trajectories
                .iter()
                .map(|t| {
                    t.mle_after(n)
                        .expect("n within length")
                        .deviation_from(theta_true)
                })
                .collect();
            let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt();
            for e in errors.iter_mut() {
                *e = e.abs();
            }
            errors.sort_by(f64::total_cmp);
            ConsistencyRow {
                n,
                median_abs_error_rad: median(&errors),
                rmse_rad: rmse,
            }
        })
        .collect()
}

/// Statistics of an ensemble whose trajectories all have `n_photons` steps.
/// `theta_true_deg` is used only to report errors and to place `mu_deg`.
pub fn analyze_trajectories(
    trajectories: &[Trajectory],
    theta_true_deg: f64,
    significance: f64,
    ci_level: f64,
    provenance: Provenance,
) -> Result<EnsembleSummary, HarnessError> {
    let n_photons = trajectories.first().map_or(0, |t| t.steps.len());
    if n_photons == 0 || trajectories.iter().any(|t| t.steps.len() != n_photons) {
        return Err(HarnessError::Inconsistent(
            "trajectories must be nonempty and of equal length".into(),
        ));
    }
    let finals: Vec<AngleRad> = trajectories
        .iter()
        .map(|t| t.final_mle().expect("nonempty"))
        .collect();
    let theta_true = AngleRad::from_degrees(theta_true_deg);

    let raw_mean = mean_ci(&finals, ci_level)?;
    let shift = wrapped_deviation((raw_mean.estimate - theta_true_deg).to_radians()).to_degrees()
        - (raw_mean.estimate - theta_true_deg);
    let mean = ConfidenceInterval {
        lower: raw_mean.lower + shift,
        upper: raw_mean.upper + shift,
        estimate: raw_mean.estimate + shift,
        ..raw_mean
    };
    let variance = variance_ci(&finals, n_photons, ci_level)?;
    let sample = standardize(&finals, n_photons, QUANTUM_FISHER_INFORMATION)?;
    let gof = gof_test(&sample, significance)?;

    let rmse_table = consistency_table(trajectories, theta_true)
        .into_iter()
        .filter(|row| SUMMARY_CHECKPOINTS.contains(&row.n) || row.n == n_photons)
        .collect();

    Ok(EnsembleSummary {
        theta_true_deg,
        n_photons,
        trials: trajectories.len(),
        mu_deg: mean.estimate,
        mu_halfwidth_deg: mean.half_width(),
        mean_ci: mean,
        variance_ci: variance,
        x2: gof.statistic,
        dof: gof.dof,
        accept: gof.accept,
        gof,
        rmse_table,
        provenance,
    })
}

fn fmt_edge(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.6}")
    }
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| HarnessError::io(path, e))
}

/// Writes `histogram.csv`, `density.csv`, `consistency.csv` and `summary.json` into `dir`.
pub fn write_analysis_outputs(
    dir: &Path,
    summary: &EnsembleSummary,
    consistency: &[ConsistencyRow],
) -> Result<(), HarnessError> {
    let n = summary.n_photons;
    let bins = BinSpec::for_resolution(crate::stats::scaled_resolution(
        n,
        QUANTUM_FISHER_INFORMATION,
    ));
    write_file(&dir.join(HISTOGRAM_FILE), |out| {
        writeln!(out, "bin_index,lower,upper,observed,expected")?;
        for b in 0..bins.count() {
            let (lower, upper) = bins.bounds(b);
            writeln!(
                out,
                "{b},{},{},{},{:.4}",
                fmt_edge(lower),
                fmt_edge(upper),
                summary.gof.counts[b],
                summary.gof.expected[b]
            )?;
        }
        Ok(())
    })?;
    write_file(&dir.join(DENSITY_FILE), |out| {
        writeln!(out, "z,density")?;
        for i in -80..=80 {
            let z = i as f64 * 0.05;
            writeln!(out, "{z:.2},{:.6}", normal_pdf(z))?;
        }
        Ok(())
    })?;
    write_file(&dir.join(CONSISTENCY_FILE), |out| {
        writeln!(out, "n,median_abs_error_deg,rmse_deg")?;
        for row in consistency {
            writeln!(
                out,
                "{},{:.4},{:.4}",
                row.n,
                row.median_abs_error_rad.to_degrees(),
                row.rmse_rad.to_degrees()
            )?;
        }
        Ok(())
    })?;
    let path = dir.join(SUMMARY_FILE);
    let mut text = serde_json::to_string_pretty(summary).map_err(|source| HarnessError::Json {
        path: path.clone(),
        source,
    })?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))
}

/// Recomputes every estimate from `trace.csv` by replay and writes the
/// analysis files next to it.
pub fn cmd_analyze(
    input_dir: &Path,
    significance: f64,
    ci_level: f64,
) -> Result<EnsembleSummary, HarnessError> {
    let config = ExperimentConfig::from_file(&input_dir.join(CONFIG_FILE))?;
    let trace = read_trace(&input_dir.join(TRACE_FILE))?;
    for (trial, records) in &trace.trials {
        if records.len() != config.n_photons {
            return Err(HarnessError::Inconsistent(format!(
                "trial {trial} has {} records, config expects {}",
                records.len(),
                config.n_photons
            )));
        }
    }
    let replayed = replay_trace(&trace, config.grid_size, config.theta_true(), None)?;
    let trajectories: Vec<Trajectory> = replayed.into_iter().map(|(_, t)| t).collect();
    let provenance = Provenance {
        master_seed: Some(config.master_seed),
        config: Some(config.clone()),
        version: CODE_VERSION.to_string(),
    };
    let summary = analyze_trajectories(
        &trajectories,
        config.theta_true_deg,
        significance,
        ci_level,
        provenance,
    )?;
    let consistency = consistency_table(&trajectories, config.theta_true());
    write_analysis_outputs(input_dir, &summary, &consistency)?;
    Ok(summary)
}
