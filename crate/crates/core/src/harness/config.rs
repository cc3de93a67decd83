use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use super::HarnessError;
use crate::estimator::DEFAULT_GRID_SIZE;
use crate::model::AngleRad;

/// Where the estimator starts: a uniformly drawn grid point from the trial's
/// seeded stream, or a fixed angle in degrees. Serialized as `"random"` or a number.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InitialGuess {
    #[default]
    Random,
    FixedDeg(f64),
}

impl Serialize for InitialGuess {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            InitialGuess::Random => s.serialize_str("random"),
            InitialGuess::FixedDeg(deg) => s.serialize_f64(*deg),
        }
    }
}

impl<'de> Deserialize<'de> for InitialGuess {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct GuessVisitor;
        impl Visitor<'_> for GuessVisitor {
            type Value = InitialGuess;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"random\" or an angle in degrees")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<InitialGuess, E> {
                if v == "random" {
                    Ok(InitialGuess::Random)
                } else {
                    v.parse()
                        .map(InitialGuess::FixedDeg)
                        .map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<InitialGuess, E> {
                Ok(InitialGuess::FixedDeg(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<InitialGuess, E> {
                Ok(InitialGuess::FixedDeg(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<InitialGuess, E> {
                Ok(InitialGuess::FixedDeg(v as f64))
            }
        }
        d.deserialize_any(GuessVisitor)
    }
}

/// Flat experiment configuration. Angles are in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub theta_true_deg: f64,
    pub n_photons: usize,
    pub trials: usize,
    pub grid_size: usize,
    pub master_seed: u64,
    pub initial_guess: InitialGuess,
    pub significance: f64,
    pub ci_level: f64,
    pub output_dir: PathBuf,
    /// Worker threads for the ensemble; `None` uses every available core.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            theta_true_deg: 60.0,
            n_photons: 300,
            trials: 500,
            grid_size: DEFAULT_GRID_SIZE,
            master_seed: 0,
            initial_guess: InitialGuess::Random,
            significance: 0.10,
            ci_level: 0.90,
            output_dir: PathBuf::from("out"),
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: path.to_owned(),
            source,
        })
    }

    /// Checks ranges and wraps `theta_true_deg` into `[0, 90)`.
    pub fn validated(mut self) -> Result<Self, HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if !self.theta_true_deg.is_finite() {
            return bad(format!(
                "theta_true_deg must be finite, got {}",
                self.theta_true_deg
            ));
        }
        if self.n_photons < 1 {
            return bad("n_photons must be at least 1".into());
        }
        if self.trials < 1 {
            return bad("trials must be at least 1".into());
        }
        if self.grid_size < 2 {
            return bad(format!(
                "grid_size must be at least 2, got {}",
                self.grid_size
            ));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return bad(format!(
                "significance must lie in (0, 1), got {}",
                self.significance
            ));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return bad(format!(
                "ci_level must lie in (0, 1), got {}",
                self.ci_level
            ));
        }
        if let InitialGuess::FixedDeg(deg) = self.initial_guess {
            if !deg.is_finite() {
                return bad(format!("initial_guess must be finite, got {deg}"));
            }
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        let wrapped = self.theta_true_deg.rem_euclid(90.0);
        self.theta_true_deg = if wrapped >= 90.0 { 0.0 } else { wrapped };
        Ok(self)
    }

    pub fn theta_true(&self) -> AngleRad {
        AngleRad::from_degrees(self.theta_true_deg)
    }
}
