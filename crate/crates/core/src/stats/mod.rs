//! Verification statistics for an ensemble of final estimates: standardization
//! against the Fisher information, a 23-bin Pearson goodness-of-fit test
//! against N(0, 1), and confidence intervals for the mean and variance.

mod dist;
mod gof;
mod interval;
pub mod special;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::AngleRad;

pub use dist::{
    chisq_cdf, chisq_quantile, normal_cdf, normal_pdf, normal_quantile, normal_sf, t_cdf,
    t_quantile,
};
pub use gof::{
    bin_counts, gof_test, gof_test_with_bins, normal_bin_probs, BinSpec, GofResult, BIN_COUNT,
};
pub use interval::{
    mean_ci, mean_ci_of, variance_ci, variance_ci_of, CiTarget, ConfidenceInterval,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("degrees of freedom must be finite and >= 1, got {0}")]
    InvalidDof(f64),
    #[error("probability must lie in (0, 1), got {0}")]
    InvalidProbability(f64),
    #[error("confidence level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("bin {bin} has zero expected count")]
    ZeroExpected { bin: usize },
}

/// Mean of `angles` on the circle of circumference `pi/2`: deviations from the
/// first angle are wrapped into `(-pi/4, pi/4]` and averaged.
pub fn circular_mean(angles: &[AngleRad]) -> Option<AngleRad> {
    let reference = *angles.first()?;
    let mean = angles
        .iter()
        .map(|a| a.deviation_from(reference))
        .sum::<f64>()
        / angles.len() as f64;
    Some(reference.offset(mean))
}

/// Wrapped deviations of `angles` about their circular mean.
pub fn deviations_about_mean(angles: &[AngleRad]) -> Option<(AngleRad, Vec<f64>)> {
    let center = circular_mean(angles)?;
    Some((
        center,
        angles.iter().map(|a| a.deviation_from(center)).collect(),
    ))
}

/// Unbiased sample variance.
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Scaled deviations `sqrt(nJ) * (theta_hat_i - theta_bar)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizedSample {
    pub values: Vec<f64>,
    /// Photons per trial; `None` for samples built from raw values.
    pub photons: Option<usize>,
    pub theta_bar: Option<AngleRad>,
    /// Scaled grid resolution `sqrt(nJ) * pi / 20000`.
    pub delta: f64,
}

impl StandardizedSample {
    pub fn r(&self) -> usize {
        self.values.len()
    }

    /// Centers arbitrary real values on their sample mean.
    pub fn centered(values: &[f64], delta: f64) -> Result<Self, StatsError> {
        if values.len() < 2 {
            return Err(StatsError::TooFewSamples {
                needed: 2,
                got: values.len(),
            });
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Ok(StandardizedSample {
            values: values.iter().map(|v| v - mean).collect(),
            photons: None,
            theta_bar: None,
            delta,
        })
    }
}

/// Grid resolution `pi/20000` of the default estimator, scaled by `sqrt(nJ)`.
pub fn scaled_resolution(photons: usize, fisher: f64) -> f64 {
    (photons as f64 * fisher).sqrt() * std::f64::consts::PI / 20_000.0
}

pub fn standardize(
    final_mles: &[AngleRad],
    photons: usize,
    fisher: f64,
) -> Result<StandardizedSample, StatsError> {
    if final_mles.len() < 2 {
        return Err(StatsError::TooFewSamples {
            needed: 2,
            got: final_mles.len(),
        });
    }
    let (theta_bar, deviations) = deviations_about_mean(final_mles).expect("nonempty");
    let scale = (photons as f64 * fisher).sqrt();
    Ok(StandardizedSample {
        values: deviations.into_iter().map(|d| scale * d).collect(),
        photons: Some(photons),
        theta_bar: Some(theta_bar),
        delta: scaled_resolution(photons, fisher),
    })
}
