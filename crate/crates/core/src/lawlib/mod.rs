//! Closed-form law of the log-conformal-radius decrement `B`.
//!
//! `B` has the law of the first time the diffusion started at `θ = 0` reaches
//! `2π`. Its density is the density `f_κ` of the exit time of a standard
//! Brownian motion from `(−2π/√κ, 2π/√κ)`, reweighted:
//!
//! ```text
//! ρ_B(x) = −cos(4π/κ) · exp((κ−4)² x / (8κ)) · f_κ(x)
//! ```
//!
//! `f_κ` is computed from one of two dual series: the spectral (eigenfunction)
//! series, which converges fast for large `x`, and the image-method series,
//! which converges fast for small `x`. [`density_b`] switches at `κx = 8`.

mod series;

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::specfun::{cos_pi, SeriesValue};
use crate::stats::quad::{self, QuadError};
use crate::Kappa;

use series::alternating_sum;

pub use crate::kappa::KappaError;

/// Crossover between the two series, in units of `κx`.
pub const SERIES_CROSSOVER: f64 = 8.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LawError {
    #[error(transparent)]
    Kappa(#[from] KappaError),
    #[error("argument must be positive, got x = {0}")]
    NonPositiveX(f64),
    #[error("Re(lambda) = {re} is not below the convergence abscissa {abscissa}")]
    MgfDomain { re: f64, abscissa: f64 },
    #[error("pole of the generating function at lambda = {0}")]
    Pole(Complex64),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

fn check_x(x: f64) -> Result<(), LawError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(LawError::NonPositiveX(x))
    }
}

/// Exit density of standard Brownian motion from `(−w, w)` started at 0,
/// spectral form `(π/(2w²)) Σ (−1)^j (2j+1) exp(−(2j+1)² π² x / (8w²))`.
pub fn exit_density_spectral(half_width: f64, x: f64) -> Result<SeriesValue, LawError> {
    check_x(x)?;
    let rate = PI * PI * x / (8.0 * half_width * half_width);
    let sv = alternating_sum(|j| {
        let m = (2 * j + 1) as f64;
        m * (-m * m * rate).exp()
    });
    Ok(sv.scaled(Complex64::new(PI / (2.0 * half_width * half_width), 0.0)))
}

/// The same density from the method of images,
/// `2w/√(2πx³) Σ (−1)^k (2k+1) exp(−(2k+1)² w² / (2x))`.
pub fn exit_density_heat(half_width: f64, x: f64) -> Result<SeriesValue, LawError> {
    check_x(x)?;
    let rate = half_width * half_width / (2.0 * x);
    let sv = alternating_sum(|k| {
        let m = (2 * k + 1) as f64;
        m * (-m * m * rate).exp()
    });
    let pref = 2.0 * half_width / (2.0 * PI * x * x * x).sqrt();
    Ok(sv.scaled(Complex64::new(pref, 0.0)))
}

/// Half-width `2π/√κ` of the Brownian exit interval.
pub fn exit_half_width(kappa: Kappa) -> f64 {
    2.0 * PI / kappa.value().sqrt()
}

/// `f_κ(x)` from the spectral series: `(κ/(8π)) Σ (−1)^j (2j+1) exp(−(2j+1)² κx/32)`.
pub fn f_kappa_spectral(kappa: Kappa, x: f64) -> Result<SeriesValue, LawError> {
    exit_density_spectral(exit_half_width(kappa), x)
}

/// `f_κ(x)` from the image series.
pub fn f_kappa_heat(kappa: Kappa, x: f64) -> Result<SeriesValue, LawError> {
    exit_density_heat(exit_half_width(kappa), x)
}

pub fn uses_heat_series(kappa: Kappa, x: f64) -> bool {
    kappa.value() * x < SERIES_CROSSOVER
}

/// `f_κ(x)` from whichever series converges faster at `x`.
pub fn f_kappa(kappa: Kappa, x: f64) -> Result<SeriesValue, LawError> {
    if uses_heat_series(kappa, x) {
        f_kappa_heat(kappa, x)
    } else {
        f_kappa_spectral(kappa, x)
    }
}

/// Exponential reweighting rate `(κ−4)²/(8κ)`.
pub fn reweight_rate(kappa: Kappa) -> f64 {
    let k = kappa.value();
    (k - 4.0) * (k - 4.0) / (8.0 * k)
}

/// Decay rate of the `j`-th spectral term of the density of `B`.
fn spectral_rate(kappa: Kappa, j: usize) -> f64 {
    let m = (2 * j + 1) as f64;
    m * m * kappa.value() / 32.0 - reweight_rate(kappa)
}

fn spectral_prefactor(kappa: Kappa) -> f64 {
    kappa.law_prefactor() * kappa.value() / (8.0 * PI)
}

/// Density of `B` at `x > 0`.
pub fn density_b(kappa: Kappa, x: f64) -> Result<SeriesValue, LawError> {
    check_x(x)?;
    if uses_heat_series(kappa, x) {
        let w = kappa.law_prefactor() * (reweight_rate(kappa) * x).exp();
        Ok(f_kappa_heat(kappa, x)?.scaled(Complex64::new(w, 0.0)))
    } else {
        // fold the reweighting into each exponential so large x cannot overflow
        let sv = alternating_sum(|j| (2 * j + 1) as f64 * (-spectral_rate(kappa, j) * x).exp());
        Ok(sv.scaled(Complex64::new(spectral_prefactor(kappa), 0.0)))
    }
}

/// `Pr[B > x]` from the term-by-term integrated spectral series.
fn survival_spectral(kappa: Kappa, x: f64) -> SeriesValue {
    let sv = alternating_sum(|j| {
        let rate = spectral_rate(kappa, j);
        (2 * j + 1) as f64 / rate * (-rate * x).exp()
    });
    sv.scaled(Complex64::new(spectral_prefactor(kappa), 0.0))
}

fn cdf_quadrature(kappa: Kappa, x: f64) -> Result<f64, LawError> {
    let (v, _) = quad::integrate_real(
        |t| if t <= 0.0 { 0.0 } else { density_b(kappa, t).map(|s| s.re()).unwrap_or(f64::NAN) },
        0.0,
        x,
        1e-13,
        1e-12,
    )?;
    Ok(v)
}

/// `Pr[B ≤ x]`.
pub fn cdf_b(kappa: Kappa, x: f64) -> Result<f64, LawError> {
    check_x(x)?;
    let v = if uses_heat_series(kappa, x) {
        cdf_quadrature(kappa, x)?
    } else {
        1.0 - survival_spectral(kappa, x).re()
    };
    Ok(v.clamp(0.0, 1.0))
}

/// `Pr[B > x]`, accurate in the far tail where `1 − cdf_b` would cancel.
pub fn survival_b(kappa: Kappa, x: f64) -> Result<f64, LawError> {
    check_x(x)?;
    let v = if uses_heat_series(kappa, x) {
        1.0 - cdf_quadrature(kappa, x)?
    } else {
        survival_spectral(kappa, x).re()
    };
    Ok(v.clamp(0.0, 1.0))
}

/// Convergence abscissa `1 − 2/κ − 3κ/32` of the moment generating function,
/// which is the tail exponent α.
pub fn mgf_abscissa(kappa: Kappa) -> f64 {
    gasket_exponents(kappa).alpha
}

/// `E[exp(λB)] = cos(π(1−4/κ)) / cos(π√((1−4/κ)² + 8λ/κ))` for `Re λ` below
/// the abscissa. The principal square root is used; the value does not
/// depend on the branch.
pub fn mgf_b(kappa: Kappa, lambda: Complex64) -> Result<Complex64, LawError> {
    let abscissa = mgf_abscissa(kappa);
    if !(lambda.re < abscissa) {
        return Err(LawError::MgfDomain { re: lambda.re, abscissa });
    }
    let eps = kappa.eps();
    let s = (Complex64::new(eps * eps, 0.0) + 8.0 * lambda / kappa.value()).sqrt();
    let denom = (PI * s).cos();
    if denom.norm() < 1e-300 {
        return Err(LawError::Pole(lambda));
    }
    Ok(cos_pi(eps) / denom)
}

/// `E[B] = π / ((κ/4 − 1) cot(π(1 − 4/κ)))`, with the removable singularity at
/// κ = 4 (where `E[B] = π²`) taken by its series.
pub fn mean_b(kappa: Kappa) -> f64 {
    let eps = kappa.eps();
    if eps.abs() < 1e-5 {
        // π(1−ε) tan(πε)/ε, tan(u)/u = 1 + u²/3 + 2u⁴/15
        let u2 = (PI * eps) * (PI * eps);
        PI * PI * (1.0 - eps) * (1.0 + u2 / 3.0 + 2.0 * u2 * u2 / 15.0)
    } else {
        let k = kappa.value();
        let cot = cos_pi(eps) / crate::specfun::sin_pi(eps);
        PI / ((k / 4.0 - 1.0) * cot)
    }
}

/// Tail exponent and expectation dimension of the gasket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasketExponents {
    /// `(8−κ)(3κ−8)/(32κ)`: `Pr[B > s] ≍ exp(−αs)`.
    pub alpha: f64,
    /// `3κ/32 + 1 + 2/κ = 2 − α`.
    pub expectation_dimension: f64,
}

pub fn gasket_exponents(kappa: Kappa) -> GasketExponents {
    let k = kappa.value();
    let alpha = (8.0 - k) * (3.0 * k - 8.0) / (32.0 * k);
    GasketExponents { alpha, expectation_dimension: 2.0 - alpha }
}

/// `sin(πu)/(πu)` for complex `u`.
fn sinc_pi(u: Complex64) -> Complex64 {
    let pu = PI * u;
    if pu.norm() < 1e-4 {
        let p2 = pu * pu;
        1.0 - p2 / 6.0 + p2 * p2 / 120.0
    } else {
        pu.sin() / pu
    }
}

/// First pole `κ(1 − (1−4/κ)²)/8` of [`thickness_mgf`] on the real axis.
pub fn thickness_pole(kappa: Kappa) -> f64 {
    let eps = kappa.eps();
    kappa.value() * (1.0 - eps * eps) / 8.0
}

/// Large-depth limit of the moment generating function of the electrical
/// thickness, `sinc(π(1−4/κ)) / sinc(π√((1−4/κ)² + 8λ/κ))`.
pub fn thickness_mgf(kappa: Kappa, lambda: Complex64) -> Result<Complex64, LawError> {
    let pole = thickness_pole(kappa);
    if !(lambda.re < pole) {
        return Err(LawError::MgfDomain { re: lambda.re, abscissa: pole });
    }
    let eps = kappa.eps();
    let s = (Complex64::new(eps * eps, 0.0) + 8.0 * lambda / kappa.value()).sqrt();
    let denom = sinc_pi(s);
    if denom.norm() < 1e-300 {
        return Err(LawError::Pole(lambda));
    }
    Ok(sinc_pi(Complex64::new(eps, 0.0)) / denom)
}

/// What the law is being evaluated at: a time argument or an MGF argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LawArgument {
    Time(f64),
    Lambda(Complex64),
}

/// A validated evaluation point of the exit law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitLawQuery {
    pub kappa: Kappa,
    pub argument: LawArgument,
}

impl ExitLawQuery {
    pub fn at_time(kappa: Kappa, x: f64) -> Result<Self, LawError> {
        check_x(x)?;
        Ok(Self { kappa, argument: LawArgument::Time(x) })
    }

    pub fn at_lambda(kappa: Kappa, lambda: Complex64) -> Result<Self, LawError> {
        let abscissa = mgf_abscissa(kappa);
        if !(lambda.re < abscissa) {
            return Err(LawError::MgfDomain { re: lambda.re, abscissa });
        }
        Ok(Self { kappa, argument: LawArgument::Lambda(lambda) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: f64) -> Kappa {
        Kappa::new(v).unwrap()
    }

    // 40-digit reference values of f_κ.
    #[test]
    fn f_kappa_reference_values() {
        let cases = [
            (6.0, 0.5, 0.008036115033166315061),
            (6.0, 1.0, 0.076255773025024960668),
            (6.0, 2.0, 0.13967253387205817693),
            (3.0, 0.3, 5.2569467278587430402e-9),
            (7.5, 3.0, 0.14612807470961544066),
            (4.5, 10.0, 0.043876208500377743767),
        ];
        for (kv, x, want) in cases {
            for sv in [f_kappa_spectral(k(kv), x).unwrap(), f_kappa_heat(k(kv), x).unwrap()] {
                assert!((sv.re() - want).abs() < 1e-14 + 1e-13 * want, "κ={kv} x={x}: {}", sv.re());
                assert!((sv.re() - want).abs() <= sv.error_bound + 1e-16);
            }
        }
    }

    #[test]
    fn series_agree_at_spec_points() {
        for x in [0.5, 1.0, 2.0] {
            let a = f_kappa_spectral(k(6.0), x).unwrap();
            let b = f_kappa_heat(k(6.0), x).unwrap();
            assert!((a.re() - b.re()).abs() < 1e-10);
        }
    }

    #[test]
    fn heat_series_vanishes_fast_at_zero() {
        assert!(f_kappa_heat(k(6.0), 1e-3).unwrap().re() < 1e-50);
        assert!(f_kappa_heat(k(6.0), 0.0).is_err());
        assert!(density_b(k(6.0), -1.0).is_err());
    }

    #[test]
    fn density_at_four_is_unweighted() {
        for x in [0.3, 1.0, 4.0, 30.0] {
            let d = density_b(k(4.0), x).unwrap().re();
            let f = f_kappa(k(4.0), x).unwrap().re();
            assert!((d - f).abs() <= 1e-15 * f.max(1e-300) + 1e-300, "{d} {f}");
        }
    }

    #[test]
    fn reweighting_ratio() {
        for kv in [3.0, 5.0, 6.0, 7.0] {
            for x in [3.0, 7.0, 25.0] {
                let ratio = density_b(k(kv), x).unwrap().re() / f_kappa_spectral(k(kv), x).unwrap().re();
                let want = -cos_pi(4.0 / kv) * (reweight_rate(k(kv)) * x).exp();
                assert!((ratio / want - 1.0).abs() < 1e-12, "κ={kv} x={x}");
            }
        }
    }

    #[test]
    fn tail_log_slope_is_alpha() {
        let kv = k(6.0);
        let (x1, x2) = (200.0, 210.0);
        let slope = (density_b(kv, x2).unwrap().re().ln() - density_b(kv, x1).unwrap().re().ln()) / (x2 - x1);
        assert!((-slope - 5.0 / 48.0).abs() < 1e-12);
        assert!((gasket_exponents(kv).alpha - 5.0 / 48.0).abs() < 1e-15);
    }

    #[test]
    fn cdf_limits() {
        assert!(cdf_b(k(6.0), 0.01).unwrap() < 1e-30);
        assert!(1.0 - cdf_b(k(6.0), 200.0).unwrap() < 1e-6);
        // continuity across the series crossover
        let xc = SERIES_CROSSOVER / 6.0;
        let below = cdf_quadrature(k(6.0), xc).unwrap();
        let above = 1.0 - survival_spectral(k(6.0), xc).re();
        assert!((below - above).abs() < 1e-11);
    }

    #[test]
    fn cdf_derivative_matches_density() {
        let kv = k(6.0);
        let h = 1e-4;
        let mut worst: f64 = 0.0;
        for i in 0..=76 {
            let x = 1.0 + 0.25 * i as f64;
            let fd = (cdf_b(kv, x + h).unwrap() - cdf_b(kv, x - h).unwrap()) / (2.0 * h);
            worst = worst.max((fd - density_b(kv, x).unwrap().re()).abs());
        }
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn mgf_values() {
        for kv in [3.0, 4.0, 5.5, 7.9] {
            assert!((mgf_b(k(kv), Complex64::new(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        }
        let v = mgf_b(k(6.0), Complex64::new(-1.0 / 12.0, 0.0)).unwrap();
        assert!((v - 0.5).norm() < 1e-15);
        assert!(matches!(
            mgf_b(k(6.0), Complex64::new(mgf_abscissa(k(6.0)), 0.0)),
            Err(LawError::MgfDomain { .. })
        ));
    }

    #[test]
    fn mean_values() {
        assert!((mean_b(k(6.0)) - 2.0 * 3f64.sqrt() * PI).abs() < 1e-13);
        assert!((mean_b(k(4.0)) - PI * PI).abs() < 1e-13);
        // both sides of the removable singularity at κ = 4
        for eps in [-1e-3, -2e-6, 3e-6, 1e-3] {
            let direct = PI * PI * (1.0 - eps) * (PI * eps).tan() / (PI * eps);
            assert!((mean_b(k(4.0 / (1.0 - eps))) / direct - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn mean_is_mgf_derivative() {
        for kv in [3.0, 5.0, 6.0, 7.0] {
            let h = 1e-5;
            let d = (mgf_b(k(kv), Complex64::new(h, 0.0)).unwrap() - mgf_b(k(kv), Complex64::new(-h, 0.0)).unwrap()).re
                / (2.0 * h);
            assert!((d - mean_b(k(kv))).abs() < 1e-6, "κ={kv}");
        }
    }

    #[test]
    fn exponent_values() {
        let g = gasket_exponents(k(6.0));
        assert!((g.alpha - 5.0 / 48.0).abs() < 1e-15);
        assert!((g.expectation_dimension - 91.0 / 48.0).abs() < 1e-15);
        assert!((mgf_abscissa(k(6.0)) - 5.0 / 48.0).abs() < 1e-15);
        assert!((mgf_abscissa(k(4.0)) - 0.125).abs() < 1e-15);
        for kv in [8.0 / 3.0 + 1e-9, 8.0 - 1e-9] {
            let g = gasket_exponents(k(kv));
            assert!(g.alpha.abs() < 1e-8);
            assert!((g.expectation_dimension - 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn thickness_values() {
        assert!((thickness_mgf(k(6.0), Complex64::new(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        let v = thickness_mgf(k(6.0), Complex64::new(-1.0 / 12.0, 0.0)).unwrap();
        let want = (PI / 3.0).sin() / (PI / 3.0);
        assert!((v.re - want).abs() < 1e-12);
        for i in 1..200 {
            let lam = -0.05 * i as f64;
            for kv in [3.0, 4.0, 6.0, 7.5] {
                let v = thickness_mgf(k(kv), Complex64::new(lam, 0.0)).unwrap();
                assert!(v.re > 0.0 && v.re <= 1.0 && v.im.abs() < 1e-12, "κ={kv} λ={lam}: {v}");
            }
        }
        assert!(thickness_mgf(k(6.0), Complex64::new(thickness_pole(k(6.0)), 0.0)).is_err());
    }
}
