use serde::{Deserialize, Serialize};

use super::dist::{chisq_quantile, normal_sf};
use super::{StandardizedSample, StatsError};

/// Number of bins in the standard partition.
pub const BIN_COUNT: usize = 23;
/// Minimum ensemble size accepted by [`gof_test`].
pub const MIN_GOF_SAMPLES: usize = 50;
/// Degrees of freedom subtracted for normalization and the use of the sample mean.
const DOF_SUBTRACTED: usize = 2;

/// Partition of the real line by strictly increasing edges. Bin 0 is
/// `(-inf, e_0)`, bin `b` is `[e_{b-1}, e_b)`, the last bin is `[e_last, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    edges: Vec<f64>,
    shift: f64,
}

impl BinSpec {
    /// 21 bins of width 1/3 over `[-3.5, 3.5]` plus two tails, every edge moved by `shift`.
    pub fn standard(shift: f64) -> Self {
        // (j - 10.5) / 3 is exactly antisymmetric in j <-> 21 - j
        let edges = (0..BIN_COUNT - 1)
            .map(|j| (j as f64 - 10.5) / 3.0 + shift)
            .collect();
        BinSpec { edges, shift }
    }

    /// Standard bins shifted by `delta / 10000` so grid-quantized data avoid the edges.
    pub fn for_resolution(delta: f64) -> Self {
        BinSpec::standard(delta / 10_000.0)
    }

    pub fn custom(edges: Vec<f64>) -> Option<Self> {
        let increasing = edges.windows(2).all(|w| w[0] < w[1]);
        (increasing && !edges.is_empty()).then_some(BinSpec { edges, shift: 0.0 })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn count(&self) -> usize {
        self.edges.len() + 1
    }

    /// `(lower, upper)` of bin `b`, with infinite tails.
    pub fn bounds(&self, b: usize) -> (f64, f64) {
        let lower = if b == 0 {
            f64::NEG_INFINITY
        } else {
            self.edges[b - 1]
        };
        let upper = self.edges.get(b).copied().unwrap_or(f64::INFINITY);
        (lower, upper)
    }

    pub fn index_of(&self, x: f64) -> usize {
        self.edges.partition_point(|e| *e <= x)
    }
}

pub fn bin_counts(values: &[f64], bins: &BinSpec) -> Vec<usize> {
    let mut counts = vec![0; bins.count()];
    for v in values {
        counts[bins.index_of(*v)] += 1;
    }
    counts
}

/// `P(lower <= Z < upper)` for `Z ~ N(0, 1)`. Evaluated through upper tails
/// so that mirror-image bins get bit-identical probabilities.
fn normal_interval(lower: f64, upper: f64) -> f64 {
    if upper <= 0.0 {
        normal_sf(-upper) - normal_sf(-lower)
    } else if lower >= 0.0 {
        normal_sf(lower) - normal_sf(upper)
    } else {
        1.0 - (normal_sf(upper) + normal_sf(-lower))
    }
}

pub fn normal_bin_probs(bins: &BinSpec) -> Vec<f64> {
    (0..bins.count())
        .map(|b| {
            let (lower, upper) = bins.bounds(b);
            normal_interval(lower, upper)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub counts: Vec<usize>,
    pub expected: Vec<f64>,
    pub statistic: f64,
    pub dof: usize,
    pub critical_value: f64,
    pub accept: bool,
    pub significance: f64,
}

/// Pearson test of the standardized sample against N(0, 1) on the standard
/// 23-bin partition shifted by `delta / 10000`.
pub fn gof_test(sample: &StandardizedSample, significance: f64) -> Result<GofResult, StatsError> {
    gof_test_with_bins(sample, &BinSpec::for_resolution(sample.delta), significance)
}

pub fn gof_test_with_bins(
    sample: &StandardizedSample,
    bins: &BinSpec,
    significance: f64,
) -> Result<GofResult, StatsError> {
    let r = sample.r();
    if r < MIN_GOF_SAMPLES {
        return Err(StatsError::TooFewSamples {
            needed: MIN_GOF_SAMPLES,
            got: r,
        });
    }
    if !(significance > 0.0 && significance < 1.0) {
        return Err(StatsError::InvalidProbability(significance));
    }
    let counts = bin_counts(&sample.values, bins);
    let expected: Vec<f64> = normal_bin_probs(bins)
        .iter()
        .map(|p| p * r as f64)
        .collect();
    if let Some(bin) = expected.iter().position(|e| *e <= 0.0) {
        return Err(StatsError::ZeroExpected { bin });
    }
    let statistic = counts
        .iter()
        .zip(&expected)
        .map(|(n, e)| (*n as f64 - e).powi(2) / e)
        .sum();
    let dof = bins.count() - DOF_SUBTRACTED;
    let critical_value = chisq_quantile(dof as f64, 1.0 - significance)?;
    Ok(GofResult {
        counts,
        expected,
        statistic,
        dof,
        critical_value,
        accept: statistic <= critical_value,
        significance,
    })
}

impl GofResult {
    /// Decision for an externally supplied statistic at the same dof and significance.
    pub fn accepts(statistic: f64, dof: usize, significance: f64) -> Result<bool, StatsError> {
        Ok(statistic <= chisq_quantile(dof as f64, 1.0 - significance)?)
    }
}
