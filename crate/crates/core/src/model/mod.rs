//! The one-parameter qubit model: linear polarization states, the optimal
//! binary POVM at a given setting, outcome probabilities, and the
//! information quantities that bound the estimator's variance.
//!
//! The state for a half-wave-plate angle `theta` is real in the `{|H>, |V>}`
//! basis, `(cos 2theta, sin 2theta)`, so no complex arithmetic is needed. The
//! measurement optimal at `theta_hat` projects onto
//! `<xi| = (cos(2 theta_hat + pi/4), sin(2 theta_hat + pi/4))`, which gives
//!
//! ```text
//! p(1; theta, theta_hat) = cos^2(2(theta_hat - theta) + pi/4) = (1 - sin 4d) / 2,   d = theta_hat - theta
//! ```
//!
//! The `sin 4d` form is what the code evaluates: it is exactly 0 or 1 at the
//! degenerate offsets `d = +-pi/8`, which the estimator relies on to mark
//! impossible grid points with `-inf`.

mod angle;
mod matrix;

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use angle::{wrap, wrapped_deviation, AngleRad, PERIOD};
pub use matrix::{HermitianMatrix2, Matrix2};

/// Quantum Fisher information of the model; independent of `theta`.
pub const QUANTUM_FISHER_INFORMATION: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid outcome label {0}; expected 1 or 2")]
    InvalidOutcome(u8),
    #[error("measurement setting is uninformative: p(1) = {p1}")]
    DegenerateSetting { p1: f64 },
}

/// Which detector clicked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Outcome {
    One,
    Two,
}

impl Outcome {
    pub fn label(self) -> u8 {
        match self {
            Outcome::One => 1,
            Outcome::Two => 2,
        }
    }

    pub fn flipped(self) -> Outcome {
        match self {
            Outcome::One => Outcome::Two,
            Outcome::Two => Outcome::One,
        }
    }
}

impl TryFrom<u8> for Outcome {
    type Error = ModelError;
    fn try_from(label: u8) -> Result<Self, ModelError> {
        match label {
            1 => Ok(Outcome::One),
            2 => Ok(Outcome::Two),
            other => Err(ModelError::InvalidOutcome(other)),
        }
    }
}

impl From<Outcome> for u8 {
    fn from(o: Outcome) -> u8 {
        o.label()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureQubitState {
    pub amplitude_h: f64,
    pub amplitude_v: f64,
}

impl PureQubitState {
    pub fn vector(&self) -> [f64; 2] {
        [self.amplitude_h, self.amplitude_v]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitude_h * self.amplitude_h + self.amplitude_v * self.amplitude_v
    }

    /// `rho = |psi><psi|`.
    pub fn density(&self) -> HermitianMatrix2 {
        HermitianMatrix2::from_matrix(Matrix2::outer(self.vector(), self.vector()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryPovm {
    pub xi_h: f64,
    pub xi_v: f64,
    pub setting: AngleRad,
}

impl BinaryPovm {
    pub fn element(&self, outcome: Outcome) -> HermitianMatrix2 {
        let projector = Matrix2::outer([self.xi_h, self.xi_v], [self.xi_h, self.xi_v]);
        match outcome {
            Outcome::One => HermitianMatrix2::from_matrix(projector),
            Outcome::Two => HermitianMatrix2::from_matrix(Matrix2::IDENTITY - projector),
        }
    }

    /// `<psi|M(x)|psi>` evaluated through the POVM element.
    pub fn probability(&self, state: &PureQubitState, outcome: Outcome) -> f64 {
        self.element(outcome)
            .matrix()
            .quadratic_form(state.vector())
    }
}

pub fn state_of(theta: AngleRad) -> PureQubitState {
    let (s, c) = (2.0 * theta.value()).sin_cos();
    PureQubitState {
        amplitude_h: c,
        amplitude_v: s,
    }
}

pub fn povm_of(theta_hat: AngleRad) -> BinaryPovm {
    let (s, c) = (2.0 * theta_hat.value() + FRAC_PI_4).sin_cos();
    BinaryPovm {
        xi_h: c,
        xi_v: s,
        setting: theta_hat,
    }
}

/// Probability of outcome 1 when the true angle is `theta` and the POVM is set at `theta_hat`.
#[inline]
pub fn probability_one(theta: AngleRad, theta_hat: AngleRad) -> f64 {
    probability_one_at_offset(theta_hat.value() - theta.value())
}

/// `p(1)` as a function of the offset `theta_hat - theta` (any real; periodic in `pi/2`).
#[inline]
pub fn probability_one_at_offset(offset: f64) -> f64 {
    0.5 * (1.0 - (4.0 * wrapped_deviation(offset)).sin())
}

pub fn outcome_probability(outcome: Outcome, theta: AngleRad, theta_hat: AngleRad) -> f64 {
    let p1 = probability_one(theta, theta_hat);
    match outcome {
        Outcome::One => p1,
        Outcome::Two => 1.0 - p1,
    }
}

/// Same as [`outcome_probability`] but accepting a raw detector label.
pub fn outcome_probability_of_label(
    label: u8,
    theta: AngleRad,
    theta_hat: AngleRad,
) -> Result<f64, ModelError> {
    Ok(outcome_probability(
        Outcome::try_from(label)?,
        theta,
        theta_hat,
    ))
}

/// `d rho / d theta`, computed analytically from `psi(theta) = (cos 2theta, sin 2theta)`.
pub fn density_derivative(theta: AngleRad) -> HermitianMatrix2 {
    let psi = state_of(theta).vector();
    let (s, c) = (2.0 * theta.value()).sin_cos();
    let dpsi = [-2.0 * s, 2.0 * c];
    HermitianMatrix2::from_matrix(Matrix2::outer(dpsi, psi) + Matrix2::outer(psi, dpsi))
}

/// Symmetric logarithmic derivative. For a pure state `rho^2 = rho`, so
/// `L = 2 d rho / d theta` solves `d rho = (L rho + rho L) / 2`.
pub fn sld_operator(theta: AngleRad) -> HermitianMatrix2 {
    HermitianMatrix2::from_matrix(density_derivative(theta).matrix().scale(2.0))
}

/// `Tr[rho L^2]` at `theta`, evaluated through the matrices.
pub fn sld_fisher_information(theta: AngleRad) -> f64 {
    let rho = state_of(theta).density().matrix();
    let l = sld_operator(theta).matrix();
    (rho * l * l).trace()
}

pub fn quantum_fisher_information() -> f64 {
    QUANTUM_FISHER_INFORMATION
}

/// `d p(1) / d theta` at fixed setting.
pub fn probability_one_slope(theta: AngleRad, theta_hat: AngleRad) -> f64 {
    let offset = wrapped_deviation(theta_hat.value() - theta.value());
    2.0 * (4.0 * offset).cos()
}

/// Fisher information of the binary outcome distribution at `theta` for the
/// POVM set at `theta_hat`.
pub fn classical_fisher_information(
    theta: AngleRad,
    theta_hat: AngleRad,
) -> Result<f64, ModelError> {
    let p1 = probability_one(theta, theta_hat);
    let p2 = 1.0 - p1;
    if p1 <= 0.0 || p2 <= 0.0 {
        return Err(ModelError::DegenerateSetting { p1 });
    }
    let slope = probability_one_slope(theta, theta_hat);
    Ok(slope * slope / (p1 * p2))
}

/// Two-point estimator paired with `M(center)`: outcome 1 maps to
/// `center + offset`, outcome 2 to `center - offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LueEstimator {
    pub center: AngleRad,
    pub offset: f64,
}

impl LueEstimator {
    /// Estimated value on the real line around `center` (not wrapped, so
    /// moments are taken without circular folding).
    pub fn estimate(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::One => self.center.value() + self.offset,
            Outcome::Two => self.center.value() - self.offset,
        }
    }

    /// `E_theta` of the estimate when the POVM stays at `center`, expressed
    /// relative to `center` so that `theta` near the wrap point is handled.
    pub fn expectation(&self, theta: f64) -> f64 {
        let p1 = probability_one_at_offset(self.center.value() - theta);
        p1 * self.estimate(Outcome::One) + (1.0 - p1) * self.estimate(Outcome::Two)
    }

    pub fn variance(&self, theta: f64) -> f64 {
        let p1 = probability_one_at_offset(self.center.value() - theta);
        let mean = self.expectation(theta);
        let d1 = self.estimate(Outcome::One) - mean;
        let d2 = self.estimate(Outcome::Two) - mean;
        p1 * d1 * d1 + (1.0 - p1) * d2 * d2
    }
}

/// Best locally unbiased estimator at `theta0`. With `E = theta0 + c (2 p1 - 1)`,
/// unit slope at `theta0` requires `c = 1 / (2 dp1/dtheta)`.
pub fn lue_estimator(theta0: AngleRad) -> LueEstimator {
    let slope = probability_one_slope(theta0, theta0);
    LueEstimator {
        center: theta0,
        offset: 1.0 / (2.0 * slope),
    }
}
