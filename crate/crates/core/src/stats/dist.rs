//! Normal, chi-square and Student-t distribution functions.

use std::f64::consts::SQRT_2;

use super::special::{beta_inc, erfc, gamma_pq};
use super::StatsError;

fn check_dof(dof: f64) -> Result<(), StatsError> {
    if dof >= 1.0 && dof.is_finite() {
        Ok(())
    } else {
        Err(StatsError::InvalidDof(dof))
    }
}

fn check_probability(p: f64) -> Result<(), StatsError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(StatsError::InvalidProbability(p))
    }
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Upper tail `1 - Phi(x)`, accurate for large positive `x`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn chisq_cdf(dof: f64, x: f64) -> Result<f64, StatsError> {
    check_dof(dof)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok(gamma_pq(0.5 * dof, 0.5 * x).0)
}

pub fn t_cdf(dof: f64, t: f64) -> Result<f64, StatsError> {
    check_dof(dof)?;
    if t.is_infinite() {
        return Ok(if t > 0.0 { 1.0 } else { 0.0 });
    }
    let tail = 0.5 * beta_inc(0.5 * dof, 0.5, dof / (dof + t * t));
    Ok(if t >= 0.0 { 1.0 - tail } else { tail })
}

/// Bisect a nondecreasing `cdf` on `[lo, hi]` for `cdf(x) = p`.
fn bisect(cdf: impl Fn(f64) -> f64, p: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn chisq_quantile(dof: f64, p: f64) -> Result<f64, StatsError> {
    check_dof(dof)?;
    check_probability(p)?;
    let cdf = |x: f64| gamma_pq(0.5 * dof, 0.5 * x).0;
    let mut hi = dof.max(1.0);
    while cdf(hi) < p {
        hi *= 2.0;
    }
    Ok(bisect(cdf, p, 0.0, hi))
}

pub fn t_quantile(dof: f64, p: f64) -> Result<f64, StatsError> {
    check_dof(dof)?;
    check_probability(p)?;
    if p == 0.5 {
        return Ok(0.0);
    }
    // solve on the upper half and mirror
    let upper = p.max(1.0 - p);
    let cdf = |t: f64| 1.0 - 0.5 * beta_inc(0.5 * dof, 0.5, dof / (dof + t * t));
    let mut hi = 1.0;
    while cdf(hi) < upper {
        hi *= 2.0;
    }
    let t = bisect(cdf, upper, 0.0, hi);
    Ok(if p > 0.5 { t } else { -t })
}

pub fn normal_quantile(p: f64) -> Result<f64, StatsError> {
    check_probability(p)?;
    let mut lo = -1.0;
    while normal_cdf(lo) > p {
        lo *= 2.0;
    }
    let mut hi = 1.0;
    while normal_cdf(hi) < p {
        hi *= 2.0;
    }
    Ok(bisect(normal_cdf, p, lo, hi))
}
