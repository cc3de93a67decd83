use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Circumference of the parameter circle. The polarization state is unchanged
/// (up to global sign) under `theta -> theta + PERIOD`.
pub const PERIOD: f64 = FRAC_PI_2;

/// A half-wave-plate angle in radians, always stored wrapped into `[0, pi/2)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct AngleRad(f64);

impl AngleRad {
    pub const ZERO: AngleRad = AngleRad(0.0);

    pub fn new(radians: f64) -> Self {
        AngleRad(wrap(radians))
    }

    pub fn from_degrees(degrees: f64) -> Self {
        AngleRad::new(degrees.to_radians())
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    /// Signed deviation `self - other` on the circle, in `(-pi/4, pi/4]`.
    #[inline]
    pub fn deviation_from(self, other: AngleRad) -> f64 {
        wrapped_deviation(self.0 - other.0)
    }

    /// `self + delta`, wrapped.
    pub fn offset(self, delta: f64) -> AngleRad {
        AngleRad::new(self.0 + delta)
    }
}

impl From<f64> for AngleRad {
    fn from(radians: f64) -> Self {
        AngleRad::new(radians)
    }
}

impl From<AngleRad> for f64 {
    fn from(angle: AngleRad) -> f64 {
        angle.0
    }
}

impl fmt::Display for AngleRad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rad", self.0)
    }
}

/// Reduce `x` modulo `pi/2` into `[0, pi/2)`.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(PERIOD);
    // rem_euclid of a tiny negative number rounds up to PERIOD itself.
    if r >= PERIOD {
        0.0
    } else {
        r
    }
}

/// Map an arbitrary difference onto `(-pi/4, pi/4]`.
#[inline]
pub fn wrapped_deviation(x: f64) -> f64 {
    let r = wrap(x);
    if r > FRAC_PI_4 {
        r - PERIOD
    } else {
        r
    }
}
