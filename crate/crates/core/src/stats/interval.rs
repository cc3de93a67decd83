use serde::{Deserialize, Serialize};

use super::dist::{chisq_quantile, t_quantile};
use super::{deviations_about_mean, sample_variance, StatsError};
use crate::model::AngleRad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CiTarget {
    Mean,
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub target: CiTarget,
    /// Point estimate the interval is built around.
    pub estimate: f64,
}

impl ConfidenceInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.width()
    }
}

fn check(r: usize, level: f64) -> Result<(), StatsError> {
    if r < 2 {
        return Err(StatsError::TooFewSamples { needed: 2, got: r });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::InvalidLevel(level));
    }
    Ok(())
}

/// Student-t interval for the mean: `mean +- t_{r-1,(1+level)/2} sqrt(V/r)`.
pub fn mean_ci_of(values: &[f64], level: f64) -> Result<ConfidenceInterval, StatsError> {
    let r = values.len();
    check(r, level)?;
    let mean = values.iter().sum::<f64>() / r as f64;
    let half = t_quantile((r - 1) as f64, 0.5 * (1.0 + level))?
        * (sample_variance(values) / r as f64).sqrt();
    Ok(ConfidenceInterval {
        lower: mean - half,
        upper: mean + half,
        level,
        target: CiTarget::Mean,
        estimate: mean,
    })
}

/// Chi-square interval for `v`, the variance of `sqrt(n) * (value - mean)`:
/// `[n (r-1) V / chi2_{(1+level)/2}, n (r-1) V / chi2_{(1-level)/2}]`.
pub fn variance_ci_of(
    values: &[f64],
    photons: usize,
    level: f64,
) -> Result<ConfidenceInterval, StatsError> {
    let r = values.len();
    check(r, level)?;
    let dof = (r - 1) as f64;
    let scaled = photons as f64 * dof * sample_variance(values);
    Ok(ConfidenceInterval {
        lower: scaled / chisq_quantile(dof, 0.5 * (1.0 + level))?,
        upper: scaled / chisq_quantile(dof, 0.5 * (1.0 - level))?,
        level,
        target: CiTarget::Variance,
        estimate: scaled / dof,
    })
}

/// Mean interval for final estimates, in degrees. The deviations are wrapped
/// about the circular mean; the center is reported in `[0, 90)`.
pub fn mean_ci(final_mles: &[AngleRad], level: f64) -> Result<ConfidenceInterval, StatsError> {
    check(final_mles.len(), level)?;
    let (center, deviations) = deviations_about_mean(final_mles).expect("nonempty");
    let around_zero = mean_ci_of(&deviations, level)?;
    let center_deg = center.degrees();
    Ok(ConfidenceInterval {
        lower: center_deg + around_zero.lower.to_degrees(),
        upper: center_deg + around_zero.upper.to_degrees(),
        level,
        target: CiTarget::Mean,
        estimate: center_deg + around_zero.estimate.to_degrees(),
    })
}

/// Variance interval for final estimates, in rad^2.
pub fn variance_ci(
    final_mles: &[AngleRad],
    photons: usize,
    level: f64,
) -> Result<ConfidenceInterval, StatsError> {
    check(final_mles.len(), level)?;
    let (_, deviations) = deviations_about_mean(final_mles).expect("nonempty");
    variance_ci_of(&deviations, photons, level)
}
