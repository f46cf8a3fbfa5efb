//! Special functions: complex Gamma and the Gauss hypergeometric function.

mod gamma;
mod hyp2f1;

use num_complex::Complex64;
use thiserror::Error;

pub use gamma::{cos_pi, gamma, gamma_real, is_nonpositive_integer, rgamma, sin_pi, sin_pi_complex};
pub use hyp2f1::{
    hyp2f1, hyp2f1_at_one, hyp2f1_connection_terms, hyp2f1_series, hyp2f1_transformed,
    HypergeometricInput, DEGENERACY_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("Gamma has a pole at {0}")]
    GammaPole(f64),
    #[error("c = {0} is a non-positive integer")]
    InvalidC(f64),
    #[error("hypergeometric series diverges for |z| = {0} >= 1")]
    Divergent(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate parameters: {what} = {value} is (numerically) an integer")]
    Degenerate { what: &'static str, value: f64 },
    #[error("series did not converge after {terms} terms")]
    NoConvergence { terms: usize },
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("unsupported evaluation: {0}")]
    Unsupported(String),
}

/// A numeric result together with an absolute error bound and the number of
/// series terms that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub error_bound: f64,
    pub terms_used: usize,
}

impl SeriesValue {
    pub fn new(value: Complex64, error_bound: f64, terms_used: usize) -> Self {
        debug_assert!(error_bound >= 0.0 && error_bound.is_finite());
        Self { value, error_bound, terms_used }
    }

    pub fn real(value: f64, error_bound: f64, terms_used: usize) -> Self {
        Self::new(Complex64::new(value, 0.0), error_bound, terms_used)
    }

    /// Multiply by an exact factor (plus one rounding).
    pub fn scaled(self, factor: Complex64) -> Self {
        let value = self.value * factor;
        let error_bound = self.error_bound * factor.norm() + 2.0 * f64::EPSILON * value.norm();
        Self { value, error_bound, terms_used: self.terms_used }
    }

    pub fn add(&self, other: &SeriesValue) -> Self {
        let value = self.value + other.value;
        Self {
            value,
            error_bound: self.error_bound + other.error_bound + f64::EPSILON * value.norm(),
            terms_used: self.terms_used + other.terms_used,
        }
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }
}
