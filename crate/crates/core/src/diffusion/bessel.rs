//! Exact transitions of a Bessel process of dimension `d ∈ (0, 2)`.
//!
//! The squared process started at `y` satisfies
//! `Y_t = 2t·Gamma(d/2 + N)` with `N ~ Poisson(y/(2t))`, which is reflecting
//! at 0 for these dimensions. With `μ = 1 − d/2`, the probability that the
//! bridge from `x` to `x'` over time `t` touches 0 is
//! `1 − I_μ(z)/I_{−μ}(z)` with `z = x x'/t`; and the hitting time of 0 from
//! `x` has the law of `x² / (2·Gamma(μ))`.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use crate::specfun::gamma_real;

/// Above this `z` the bridge hit probability is below `1e−21`.
const BRIDGE_CUTOFF: f64 = 25.0;

#[derive(Debug, Clone)]
pub struct BesselKernel {
    dimension: f64,
    mu: f64,
    rgamma_plus: f64,
    rgamma_minus: f64,
    hitting: Gamma<f64>,
}

impl BesselKernel {
    pub fn new(dimension: f64) -> Option<Self> {
        if !(dimension > 0.0 && dimension < 2.0) {
            return None;
        }
        let mu = 1.0 - dimension / 2.0;
        Some(Self {
            dimension,
            mu,
            rgamma_plus: 1.0 / gamma_real(1.0 + mu).ok()?,
            rgamma_minus: 1.0 / gamma_real(1.0 - mu).ok()?,
            hitting: Gamma::new(mu, 1.0).ok()?,
        })
    }

    pub fn dimension(&self) -> f64 {
        self.dimension
    }

    /// Position after time `dt` from `x ≥ 0`.
    pub fn step<R: Rng + ?Sized>(&self, x: f64, dt: f64, rng: &mut R) -> f64 {
        let mean = x * x / (2.0 * dt);
        let n = if mean > 0.0 {
            Poisson::new(mean).expect("finite positive mean").sample(rng)
        } else {
            0.0
        };
        let g = Gamma::new(0.5 * self.dimension + n, 1.0).expect("positive shape").sample(rng);
        (2.0 * dt * g).sqrt()
    }

    /// Probability that the bridge from `x0` to `x1` over `dt` touches 0.
    pub fn bridge_hit_probability(&self, x0: f64, x1: f64, dt: f64) -> f64 {
        let z = x0 * x1 / dt;
        if z >= BRIDGE_CUTOFF {
            return 0.0;
        }
        if z <= 0.0 {
            return 1.0;
        }
        let w = 0.25 * z * z;
        let ratio = (0.5 * z).powf(2.0 * self.mu) * self.scaled_i(w, self.mu) * self.rgamma_plus
            / (self.scaled_i(w, -self.mu) * self.rgamma_minus);
        (1.0 - ratio).clamp(0.0, 1.0)
    }

    /// `Γ(1+ν) Σ_k w^k / (k! Γ(k+ν+1))`.
    fn scaled_i(&self, w: f64, nu: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            term *= w / ((k + 1.0) * (k + 1.0 + nu));
            sum += term;
            k += 1.0;
            if term < 1e-17 * sum && k * k > w {
                return sum;
            }
        }
    }

    /// Hitting time of 0 from `x`.
    pub fn sample_hitting_time<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> f64 {
        x * x / (2.0 * self.hitting.sample(rng))
    }
}
