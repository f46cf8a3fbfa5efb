use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::cos_pi;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("kappa must lie in the open interval (8/3, 8), got {0}")]
pub struct KappaError(pub f64);

/// The loop-ensemble parameter κ, validated to the open interval `(8/3, 8)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Kappa(f64);

impl Kappa {
    pub const MIN: f64 = 8.0 / 3.0;
    pub const MAX: f64 = 8.0;

    pub fn new(kappa: f64) -> Result<Self, KappaError> {
        if kappa.is_finite() && kappa > Self::MIN && kappa < Self::MAX {
            Ok(Self(kappa))
        } else {
            Err(KappaError(kappa))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 − 4/κ`, the shift that recurs in every closed form.
    pub fn eps(self) -> f64 {
        1.0 - 4.0 / self.0
    }

    /// Loop-model weight `n = −2 cos(4π/κ)`.
    pub fn loop_weight(self) -> f64 {
        -2.0 * cos_pi(4.0 / self.0)
    }

    /// `−cos(4π/κ) = cos(π(1 − 4/κ))`, the normalising prefactor of the law.
    pub fn law_prefactor(self) -> f64 {
        cos_pi(self.eps())
    }

    /// Dimension `(3κ − 8)/κ` of the Bessel process the diffusion resembles
    /// near its singular points.
    pub fn bessel_dimension(self) -> f64 {
        (3.0 * self.0 - 8.0) / self.0
    }

    pub fn is_four(self) -> bool {
        self.0 == 4.0
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<f64> for Kappa {
    type Error = KappaError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Kappa::new(v)
    }
}

impl From<Kappa> for f64 {
    fn from(k: Kappa) -> f64 {
        k.0
    }
}
