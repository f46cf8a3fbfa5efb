//! Hypergeometric local martingales of the diffusion and the expected first
//! hitting point `L(θ) = E[θ_T | θ_0 = θ]`.
//!
//! For `λ ∈ ℂ` both `e^{λt} M^e(θ_t)` and `e^{λt} M^o(θ_t)` are local
//! martingales up to the first time `θ_t ∈ 2πℤ`, where
//!
//! ```text
//! M^e(θ) = F(1−4/κ+s, 1−4/κ−s; 3/2−4/κ; sin²(θ/4)),   s  = √((1−4/κ)² + 8λ/κ)
//! M^o(θ) = F(1−2/κ+s', 1−2/κ−s'; 3/2; cos²(θ/2)) cos(θ/2),   s' = √((1/2−2/κ)² + 2λ/κ)
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::specfun::{cos_pi, gamma_real, hyp2f1, sin_pi, HypergeometricInput, SpecfunError};
use crate::Kappa;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MartingaleError {
    #[error("theta = {theta} outside [{lo}, {hi}]")]
    ThetaOutOfRange { theta: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// `κ`, `λ` and the parity of the martingale. The square root in the
/// parameters is the principal one unless [`MartingaleParams::negated_root`]
/// is used; the values agree either way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MartingaleParams {
    pub kappa: Kappa,
    pub lambda: Complex64,
    pub parity: Parity,
    negate_root: bool,
}

impl MartingaleParams {
    pub fn new(kappa: Kappa, lambda: Complex64, parity: Parity) -> Self {
        Self { kappa, lambda, parity, negate_root: false }
    }

    pub fn even(kappa: Kappa, lambda: f64) -> Self {
        Self::new(kappa, Complex64::new(lambda, 0.0), Parity::Even)
    }

    pub fn odd(kappa: Kappa, lambda: f64) -> Self {
        Self::new(kappa, Complex64::new(lambda, 0.0), Parity::Odd)
    }

    /// The same function with the other square-root branch.
    pub fn negated_root(self) -> Self {
        Self { negate_root: !self.negate_root, ..self }
    }

    fn root(&self) -> Complex64 {
        let k = self.kappa.value();
        let s = match self.parity {
            Parity::Even => {
                let e = self.kappa.eps();
                (Complex64::new(e * e, 0.0) + 8.0 * self.lambda / k).sqrt()
            }
            Parity::Odd => {
                let e = 0.5 - 2.0 / k;
                (Complex64::new(e * e, 0.0) + 2.0 * self.lambda / k).sqrt()
            }
        };
        if self.negate_root {
            -s
        } else {
            s
        }
    }

    /// The ₂F₁ parameters `(a, b, c)`.
    pub fn abc(&self) -> (Complex64, Complex64, Complex64) {
        let k = self.kappa.value();
        let s = self.root();
        match self.parity {
            Parity::Even => {
                let e = Complex64::new(1.0 - 4.0 / k, 0.0);
                (e + s, e - s, Complex64::new(1.5 - 4.0 / k, 0.0))
            }
            Parity::Odd => {
                let e = Complex64::new(1.0 - 2.0 / k, 0.0);
                (e + s, e - s, Complex64::new(1.5, 0.0))
            }
        }
    }

    /// `M^e` on `[−2π, 2π]`, `M^o` on `[0, 2π]`.
    pub fn eval(&self, theta: f64) -> Result<Complex64, MartingaleError> {
        let (lo, hi) = match self.parity {
            Parity::Even => (-2.0 * PI, 2.0 * PI),
            Parity::Odd => (0.0, 2.0 * PI),
        };
        if !(theta >= lo && theta <= hi) {
            return Err(MartingaleError::ThetaOutOfRange { theta, lo, hi });
        }
        if self.parity == Parity::Even && self.lambda == Complex64::new(0.0, 0.0) {
            // b = 0: the series terminates at 1
            return Ok(Complex64::new(1.0, 0.0));
        }
        let (a, b, c) = self.abc();
        match self.parity {
            Parity::Even => {
                let sn = sin_pi(theta / (4.0 * PI));
                let z = sn * sn;
                Ok(hyp2f1(&HypergeometricInput::new(a, b, c, Complex64::new(z, 0.0))?)?.value)
            }
            Parity::Odd => {
                let cs = cos_pi(theta / (2.0 * PI));
                if cs == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let f = hyp2f1(&HypergeometricInput::new(a, b, c, Complex64::new(cs * cs, 0.0))?)?;
                Ok(f.value * cs)
            }
        }
    }
}

/// `M^e_{κ,λ}(θ)`.
pub fn m_even(kappa: Kappa, lambda: Complex64, theta: f64) -> Result<Complex64, MartingaleError> {
    MartingaleParams::new(kappa, lambda, Parity::Even).eval(theta)
}

/// `M^o_{κ,λ}(θ)`.
pub fn m_odd(kappa: Kappa, lambda: Complex64, theta: f64) -> Result<Complex64, MartingaleError> {
    MartingaleParams::new(kappa, lambda, Parity::Odd).eval(theta)
}

/// `M^e(±2π) = cos(π√((1−4/κ)² + 8λ/κ)) / cos(π(1−4/κ))`.
pub fn m_even_boundary(kappa: Kappa, lambda: Complex64) -> Complex64 {
    let e = kappa.eps();
    let s = (Complex64::new(e * e, 0.0) + 8.0 * lambda / kappa.value()).sqrt();
    (PI * s).cos() / cos_pi(e)
}

/// `M^o_{κ,0}(0) = √π Γ(4/κ − 1/2) / (2 Γ(4/κ))`.
pub fn m_odd_zero(kappa: Kappa) -> f64 {
    let q = 4.0 / kappa.value();
    PI.sqrt() * gamma_real(q - 0.5).expect("4/κ − 1/2 ∈ (0, 1)") / (2.0 * gamma_real(q).expect("4/κ > 0"))
}

/// `L(θ)` on `[0, 2π]`, from the bounded martingale `M^o_{κ,0}`.
fn l_theta_period(kappa: Kappa, r: f64) -> f64 {
    if kappa.is_four() {
        return r;
    }
    let m = m_odd(kappa, Complex64::new(0.0, 0.0), r).expect("r lies in [0, 2π]").re;
    PI - PI * m / m_odd_zero(kappa)
}

/// Expected first point of `2πℤ` hit by the lifted diffusion started at `θ`.
/// Odd, and `L(θ + 2π) = L(θ) + 2π`.
pub fn l_theta(kappa: Kappa, theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let k = (theta / two_pi).floor();
    let r = theta - k * two_pi;
    if theta < 0.0 {
        return -l_theta(kappa, -theta);
    }
    k * two_pi + l_theta_period(kappa, r.clamp(0.0, two_pi))
}

/// `c_κ = 2√π Γ(4/κ) κ / (Γ(4/κ − 1/2)(8 − κ))`, the constant in the
/// small-angle form of `L`.
pub fn l_small_constant(kappa: Kappa) -> f64 {
    let k = kappa.value();
    let q = 4.0 / k;
    2.0 * PI.sqrt() * gamma_real(q).expect("4/κ > 0") / gamma_real(q - 0.5).expect("4/κ − 1/2 ∈ (0, 1)") * k
        / (8.0 - k)
}

/// `L(θ) = c_κ sin(θ/2)^{8/κ−1} F(4/κ, 1; 4/κ + 1/2; sin²(θ/2)) cos(θ/2)` on
/// `(0, π)`. Free of the cancellation the direct formula suffers near 0.
pub fn l_theta_small(kappa: Kappa, theta: f64) -> Result<f64, MartingaleError> {
    if !(theta > 0.0 && theta < PI) {
        return Err(MartingaleError::ThetaOutOfRange { theta, lo: 0.0, hi: PI });
    }
    let q = 4.0 / kappa.value();
    let sn = sin_pi(theta / (2.0 * PI));
    let f = hyp2f1(&HypergeometricInput::real(q, 1.0, q + 0.5, sn * sn)?)?.re();
    Ok(l_small_constant(kappa) * sn.powf(2.0 * q - 1.0) * f * cos_pi(theta / (2.0 * PI)))
}

/// Power `8/κ − 1` of `L(θ)` near `θ = 0`.
pub fn l_small_theta_exponent(kappa: Kappa) -> f64 {
    8.0 / kappa.value() - 1.0
}

/// `λM + ((κ−4)/2) cot(θ/2) M' + (κ/2) M''`, the drift of `e^{λt}M(θ_t)`
/// divided by `e^{λt}`, with derivatives from Richardson-extrapolated
/// central differences of step `h`.
pub fn generator_residual(params: &MartingaleParams, theta: f64, h: f64) -> Result<Complex64, MartingaleError> {
    let m0 = params.eval(theta)?;
    let diffs = |h: f64| -> Result<(Complex64, Complex64), MartingaleError> {
        let mp = params.eval(theta + h)?;
        let mm = params.eval(theta - h)?;
        Ok(((mp - mm) / (2.0 * h), (mp - 2.0 * m0 + mm) / (h * h)))
    };
    let (d1a, d2a) = diffs(h)?;
    let (d1b, d2b) = diffs(0.5 * h)?;
    let d1 = (4.0 * d1b - d1a) / 3.0;
    let d2 = (4.0 * d2b - d2a) / 3.0;
    let k = params.kappa.value();
    let cot = cos_pi(theta / (2.0 * PI)) / sin_pi(theta / (2.0 * PI));
    Ok(params.lambda * m0 + d1 * ((k - 4.0) / 2.0 * cot) + d2 * (k / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k(v: f64) -> Kappa {
        Kappa::new(v).unwrap()
    }
    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn even_at_zero_lambda_is_one() {
        for kv in [3.0, 4.0, 6.0, 7.5] {
            for i in 0..=20 {
                let th = -2.0 * PI + 0.2 * PI * i as f64;
                assert!((m_even(k(kv), c(0.0), th).unwrap() - 1.0).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn even_boundary_value() {
        let v = m_even(k(6.0), c(-1.0 / 12.0), 2.0 * PI).unwrap();
        assert!((v - 2.0).norm() < 1e-12, "{v}");
        assert!((m_even_boundary(k(6.0), c(-1.0 / 12.0)) - 2.0).norm() < 1e-12);
        assert!(m_even(k(6.0), c(0.0), 2.0 * PI + 0.1).is_err());
    }

    #[test]
    fn odd_special_values() {
        for kv in [3.0, 5.0, 6.0, 7.0] {
            let m0 = m_odd(k(kv), c(0.0), 0.0).unwrap();
            let m2 = m_odd(k(kv), c(0.0), 2.0 * PI).unwrap();
            assert!((m0.re - m_odd_zero(k(kv))).abs() < 1e-13);
            assert!((m0 + m2).norm() < 1e-13);
            assert_eq!(m_odd(k(kv), c(-0.3), PI).unwrap(), c(0.0));
        }
    }

    #[test]
    fn odd_at_one_agrees_with_series_limit() {
        // M^o_{κ,0}(θ) approaches its value at 0 continuously
        let kv = k(5.0);
        let near = m_odd(kv, c(0.0), 1e-6).unwrap().re;
        assert!((near - m_odd_zero(kv)).abs() < 1e-3);
    }

    #[test]
    fn branch_invariance() {
        for (kv, lam) in [(3.0, -0.7), (6.0, -0.1), (7.0, 0.02), (4.5, -2.0)] {
            for parity in [Parity::Even, Parity::Odd] {
                let p = MartingaleParams::new(k(kv), c(lam), parity);
                for th in [0.3, 1.0, 2.5, 4.0, 6.0] {
                    let a = p.eval(th).unwrap();
                    let b = p.negated_root().eval(th).unwrap();
                    assert!((a - b).norm() <= 1e-13 * a.norm().max(1.0), "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn l_special_values() {
        for kv in [3.0, 5.0, 6.0, 7.0] {
            assert!(l_theta(k(kv), 0.0).abs() < 1e-13);
            assert!((l_theta(k(kv), 2.0 * PI) - 2.0 * PI).abs() < 1e-13);
            assert!((l_theta(k(kv), PI) - PI).abs() < 1e-15);
        }
        for th in [-7.0, -1.0, 0.5, 3.0, 11.0] {
            assert_eq!(l_theta(k(4.0), th), th);
        }
    }

    #[test]
    fn l_is_increasing() {
        for kv in [3.0, 6.0, 7.5] {
            let mut prev = -1.0;
            for i in 0..=1000 {
                let l = l_theta(k(kv), 2.0 * PI * i as f64 / 1000.0);
                assert!(l > prev, "κ={kv} i={i}");
                prev = l;
            }
        }
    }

    #[test]
    fn l_small_form_agrees() {
        for kv in [3.0, 5.0, 6.0, 7.5] {
            for th in [0.2, 1.0, 2.0, 3.0] {
                let a = l_theta(k(kv), th);
                let b = l_theta_small(k(kv), th).unwrap();
                assert!((a - b).abs() < 1e-12, "κ={kv} θ={th}: {a} {b}");
            }
        }
        // κ = 4: c_4 sin·F·cos collapses to θ
        assert!((l_theta_small(k(4.0), 1.3).unwrap() - 1.3).abs() < 1e-14);
    }

    #[test]
    fn legendre_duplication_constant() {
        // c_κ = 2^{8/κ−1} Γ(4/κ)² / Γ(8/κ)
        for kv in [3.0, 5.0, 6.0, 7.5] {
            let q = 4.0 / kv;
            let alt = 2f64.powf(2.0 * q - 1.0) * gamma_real(q).unwrap().powi(2) / gamma_real(2.0 * q).unwrap();
            assert!((l_small_constant(k(kv)) / alt - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn small_theta_exponent() {
        assert!((l_small_theta_exponent(k(6.0)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((l_small_theta_exponent(k(8.0 / 3.0 + 1e-12)) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn generator_annihilates_even_and_odd() {
        for kv in [3.0, 5.0, 6.0, 7.0] {
            for lam in [-1.0, -0.3, 0.05] {
                for parity in [Parity::Even, Parity::Odd] {
                    let p = MartingaleParams::new(k(kv), c(lam), parity);
                    for th in [0.5, 1.5, 3.0, 4.5, 5.7] {
                        let r = generator_residual(&p, th, 1e-2).unwrap();
                        assert!(r.norm() < 1e-6, "κ={kv} λ={lam} {parity:?} θ={th}: {r}");
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]
        #[test]
        fn boundary_closed_form(kv in 2.7f64..7.95, lam in -3.0f64..0.0) {
            let v = m_even(k(kv), c(lam), 2.0 * PI).unwrap();
            let w = m_even_boundary(k(kv), c(lam));
            prop_assert!((v - w).norm() < 1e-9 * w.norm().max(1.0), "{} vs {}", v, w);
        }

        #[test]
        fn l_odd_and_quasi_periodic(kv in 2.7f64..7.95, th in -10.0f64..10.0) {
            let l = |t| l_theta(k(kv), t);
            prop_assert!((l(-th) + l(th)).abs() < 1e-12);
            prop_assert!((l(th + 2.0 * PI) - l(th) - 2.0 * PI).abs() < 1e-12);
        }
    }
}
