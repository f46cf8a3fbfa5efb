//! Gauss hypergeometric function `₂F₁(a, b; c; z)`.
//!
//! Three evaluation routes are provided and [`hyp2f1`] dispatches between
//! them:
//!
//! * the defining power series, for `|z| ≤ 1/2`;
//! * the `z ↦ 1 − z` connection formula, for real `1/2 < z < 1`;
//! * Gauss summation, at `z = 1`.
//!
//! Every series evaluation returns a [`SeriesValue`] carrying an absolute
//! error bound made of a geometric tail bound plus a rounding estimate.

use num_complex::Complex64;

use super::gamma::{gamma, is_nonpositive_integer, rgamma};
use super::{SeriesValue, SpecfunError};

/// Relative size below which a term counts as negligible.
const NEGLIGIBLE: f64 = 1e-16;
/// Consecutive negligible terms required before stopping.
const NEGLIGIBLE_RUN: usize = 3;
const MAX_TERMS: usize = 200_000;
/// Tolerance for detecting an integer `c − a − b` in the connection formula.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Parameters and argument of `F(a, b; c; z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricInput {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
}

impl HypergeometricInput {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<Self, SpecfunError> {
        for v in [a, b, c, z] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(SpecfunError::NonFinite("hypergeometric input"));
            }
        }
        if c.im == 0.0 && c.re <= 0.0 && (c.re - c.re.round()).abs() < 1e-12 {
            return Err(SpecfunError::InvalidC(c.re));
        }
        Ok(Self { a, b, c, z })
    }

    /// Convenience constructor for all-real inputs.
    pub fn real(a: f64, b: f64, c: f64, z: f64) -> Result<Self, SpecfunError> {
        Self::new(a.into(), b.into(), c.into(), z.into())
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }
    pub fn b(&self) -> Complex64 {
        self.b
    }
    pub fn c(&self) -> Complex64 {
        self.c
    }
    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// Same parameters with `a` and `b` exchanged.
    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a, ..*self }
    }

    pub fn with_z(&self, z: Complex64) -> Self {
        Self { z, ..*self }
    }
}

/// `(a, b)` in a fixed order so that swapped inputs take the same
/// arithmetic path and agree bit for bit.
fn ordered(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    if b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)).is_lt() {
        (b, a)
    } else {
        (a, b)
    }
}

/// Direct summation of `Σ (a)_n (b)_n / ((c)_n n!) zⁿ` for `|z| < 1`.
pub fn hyp2f1_series(input: &HypergeometricInput) -> Result<SeriesValue, SpecfunError> {
    let HypergeometricInput { a, b, c, z } = *input;
    let (a, b) = ordered(a, b);
    let zabs = z.norm();
    if zabs >= 1.0 {
        return Err(SpecfunError::Divergent(zabs));
    }
    let (abs_a, abs_b, abs_c) = (a.norm(), b.norm(), c.norm());

    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut abs_sum = 1.0;
    let mut weighted_abs = 0.0;
    let mut run = 0usize;
    let mut n = 0usize;

    loop {
        let nf = n as f64;
        term = term * ((a + nf) * (b + nf)) / ((c + nf) * (nf + 1.0)) * z;
        n += 1;
        let t = term.norm();
        sum += term;
        abs_sum += t;
        weighted_abs += t * (n as f64).sqrt();

        if t == 0.0 {
            // a or b is a non-positive integer: the series terminated
            let rounding = 4.0 * f64::EPSILON * (abs_sum + weighted_abs);
            return Ok(SeriesValue::new(sum, rounding, n + 1));
        }

        if t < NEGLIGIBLE * sum.norm() {
            run += 1;
        } else {
            run = 0;
        }

        if run >= NEGLIGIBLE_RUN {
            let nn = n as f64;
            if nn > abs_c {
                // sup over m ≥ n of |(a+m)(b+m)/((c+m)(m+1))|
                let ratio = zabs
                    * ((nn + abs_a) / (nn + 1.0)).max(1.0)
                    * ((nn + abs_b) / (nn + 1.0)).max(1.0)
                    * ((nn + 1.0) / (nn - abs_c));
                if ratio < 1.0 {
                    let tail = t * ratio / (1.0 - ratio);
                    let rounding = 4.0 * f64::EPSILON * (abs_sum + weighted_abs);
                    return Ok(SeriesValue::new(sum, tail + rounding, n + 1));
                }
            }
        }
        if n >= MAX_TERMS {
            return Err(SpecfunError::NoConvergence { terms: n });
        }
    }
}

/// Gauss summation `F(a, b; c; 1) = Γ(c)Γ(c−a−b) / (Γ(c−a)Γ(c−b))`.
pub fn hyp2f1_at_one(a: Complex64, b: Complex64, c: Complex64) -> Result<Complex64, SpecfunError> {
    if is_nonpositive_integer(c) {
        return Err(SpecfunError::InvalidC(c.re));
    }
    let (a, b) = ordered(a, b);
    let s = c - a - b;
    if s.re <= 0.0 {
        return Err(SpecfunError::Domain(format!(
            "Gauss summation needs Re(c - a - b) > 0, got {}",
            s.re
        )));
    }
    Ok(gamma(c)? * gamma(s)? * (rgamma(c - a) * rgamma(c - b)))
}

/// The two terms of the `z ↦ 1 − z` connection formula,
///
/// ```text
/// F(a,b;c;z) = Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b)) · F(a, b; a+b−c+1; 1−z)
///            + Γ(c)Γ(a+b−c)/(Γ(a)Γ(b)) · (1−z)^(c−a−b) · F(c−a, c−b; c−a−b+1; 1−z)
/// ```
///
/// returned separately so callers can inspect the split. Only an integer
/// `c − a − b` makes the formula degenerate.
pub fn hyp2f1_connection_terms(
    input: &HypergeometricInput,
) -> Result<(SeriesValue, SeriesValue), SpecfunError> {
    let HypergeometricInput { a, b, c, z } = *input;
    let (a, b) = ordered(a, b);
    let s = c - a - b;
    if s.im.abs() < DEGENERACY_TOL && (s.re - s.re.round()).abs() < DEGENERACY_TOL {
        return Err(SpecfunError::Degenerate { what: "c - a - b", value: s.re });
    }
    let w = 1.0 - z;
    if w.norm() >= 1.0 || w.norm() == 0.0 {
        return Err(SpecfunError::Domain(format!(
            "connection formula needs 0 < |1 - z| < 1, got {}",
            w.norm()
        )));
    }
    if w.im == 0.0 && w.re < 0.0 {
        return Err(SpecfunError::Domain("|arg(1 - z)| must be below pi".into()));
    }

    let gc = gamma(c)?;
    let first_pref = gc * gamma(s)? * (rgamma(c - a) * rgamma(c - b));
    let second_pref = gc * gamma(-s)? * (rgamma(a) * rgamma(b));

    let first = if first_pref == Complex64::new(0.0, 0.0) {
        SeriesValue::new(first_pref, 0.0, 0)
    } else {
        let sv = hyp2f1_series(&HypergeometricInput::new(a, b, 1.0 - s, w)?)?;
        sv.scaled(first_pref)
    };
    let second = if second_pref == Complex64::new(0.0, 0.0) {
        SeriesValue::new(second_pref, 0.0, 0)
    } else {
        let pow = (s * w.ln()).exp();
        let sv = hyp2f1_series(&HypergeometricInput::new(c - a, c - b, s + 1.0, w)?)?;
        sv.scaled(second_pref * pow)
    };
    Ok((first, second))
}

/// `F(a, b; c; z)` through the connection formula.
pub fn hyp2f1_transformed(input: &HypergeometricInput) -> Result<SeriesValue, SpecfunError> {
    let (first, second) = hyp2f1_connection_terms(input)?;
    Ok(first.add(&second))
}

/// Dispatching evaluator: series for `|z| ≤ 1/2`, connection formula for
/// real `z ∈ (1/2, 1)` (falling back to the series when degenerate), Gauss
/// summation at `z = 1`.
pub fn hyp2f1(input: &HypergeometricInput) -> Result<SeriesValue, SpecfunError> {
    let z = input.z;
    if z.norm() <= 0.5 {
        return hyp2f1_series(input);
    }
    if z.im == 0.0 {
        if z.re == 1.0 {
            let v = hyp2f1_at_one(input.a, input.b, input.c)?;
            return Ok(SeriesValue::new(v, 16.0 * f64::EPSILON * v.norm(), 0));
        }
        if z.re > 0.5 && z.re < 1.0 {
            return match hyp2f1_transformed(input) {
                Err(SpecfunError::Degenerate { .. }) => hyp2f1_series(input),
                other => other,
            };
        }
    }
    if z.norm() < 1.0 {
        return hyp2f1_series(input);
    }
    Err(SpecfunError::Unsupported(format!("argument z = {z}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_values() {
        let v = hyp2f1_series(&HypergeometricInput::real(0.7, -1.3, 2.1, 0.0).unwrap()).unwrap();
        assert_eq!(v.value, c(1.0, 0.0));
        let v = hyp2f1_series(&HypergeometricInput::real(0.0, 4.5, 0.3, 0.8).unwrap()).unwrap();
        assert_eq!(v.value, c(1.0, 0.0));
    }

    #[test]
    fn arcsin_identity() {
        // z F(1/2, 1/2; 3/2; z²) = arcsin z; reference from the arcsin power series
        let x: f64 = 0.5;
        let mut oracle = 0.0;
        let mut coef = 1.0; // (2k)! / (4^k (k!)^2)
        for k in 0..200 {
            if k > 0 {
                coef *= (2 * k - 1) as f64 / (2 * k) as f64;
            }
            oracle += coef * x.powi(2 * k + 1) / (2 * k + 1) as f64;
        }
        assert!((oracle - x.asin()).abs() < 1e-15);
        let v = hyp2f1_series(&HypergeometricInput::real(0.5, 0.5, 1.5, 0.25).unwrap()).unwrap();
        assert!((v.value.re - oracle / x).abs() <= v.error_bound.max(2e-16));
        assert!(v.error_bound < 1e-13);
    }

    #[test]
    fn series_rejects_outside_disk() {
        let inp = HypergeometricInput::real(0.5, 0.5, 1.5, 1.0).unwrap();
        assert!(matches!(hyp2f1_series(&inp), Err(SpecfunError::Divergent(_))));
        assert!(matches!(
            HypergeometricInput::real(1.0, 1.0, -2.0, 0.1),
            Err(SpecfunError::InvalidC(_))
        ));
    }

    #[test]
    fn gauss_summation_values() {
        let v = hyp2f1_at_one(c(0.5, 0.0), c(0.5, 0.0), c(1.5, 0.0)).unwrap();
        assert!((v.re - 1f64.asin()).abs() < 1e-14);
        assert!((v.re - PI / 2.0).abs() < 1e-14);
        let v = hyp2f1_at_one(c(0.0, 0.0), c(0.3, 0.1), c(2.2, -0.4)).unwrap();
        assert!((v - 1.0).norm() < 1e-14);
        assert!(matches!(
            hyp2f1_at_one(c(1.0, 0.0), c(1.0, 0.0), c(1.5, 0.0)),
            Err(SpecfunError::Domain(_))
        ));
    }

    #[test]
    fn kappa_six_boundary_constant() {
        // F(3/2 − 4/κ, 1/2; 3/2; 1) = Γ(3/2)Γ(4/κ − 1/2) / Γ(4/κ) at κ = 6
        let k = 6.0;
        let got = hyp2f1_at_one(c(1.5 - 4.0 / k, 0.0), c(0.5, 0.0), c(1.5, 0.0)).unwrap();
        let want = 0.5 * PI.sqrt() * super::super::gamma_real(4.0 / k - 0.5).unwrap()
            / super::super::gamma_real(4.0 / k).unwrap();
        assert!((got.re - want).abs() < 1e-14);
        // approach along z → 1 is governed by the (1 − z)^(c − a − b) term
        let (a, b, cc, w) = (1.5 - 4.0 / k, 0.5, 1.5, 1e-10);
        let near = hyp2f1(&HypergeometricInput::real(a, b, cc, 1.0 - w).unwrap()).unwrap();
        let g = |x: f64| super::super::gamma_real(x).unwrap();
        let lead = g(cc) * g(a + b - cc) / (g(a) * g(b)) * w.powf(cc - a - b);
        assert!(((near.value.re - want) / lead - 1.0).abs() < 1e-6);
    }

    // Frozen 40-digit reference values.
    #[test]
    fn reference_values() {
        let cases = [
            ((c(0.3, 0.), c(0.7, 0.), c(1.4, 0.), c(0.6, 0.)), c(1.1310257836653529701, 0.)),
            ((c(0.3, 0.), c(0.7, 0.), c(1.4, 0.), c(0.45, 0.)), c(1.0871428296766037222, 0.)),
            ((c(0.2, 0.5), c(0.2, -0.5), c(1.25, 0.), c(0.9, 0.)), c(1.370226591936795596, 0.)),
            ((c(5.0 / 6.0, 0.), c(0.5, 0.), c(1.5, 0.), c(0.5, 0.)), c(1.1980340581396433634, 0.)),
            ((c(5.0 / 6.0, 0.), c(0.5, 0.), c(1.5, 0.), c(0.99, 0.)), c(2.2608332244825090135, 0.)),
            ((c(-0.3, 0.), c(2.1, 0.), c(1.7, 0.4), c(0.2, 0.3)), c(0.90969292907577197297, -0.10949173813277424322)),
            ((c(2.0 / 3.0, 0.), c(1.0, 0.), c(2.0 / 3.0 + 0.5, 0.), c(0.75, 0.)), c(2.1699104209329463523, 0.)),
        ];
        for ((a, b, cc, z), want) in cases {
            let v = hyp2f1(&HypergeometricInput::new(a, b, cc, z).unwrap()).unwrap();
            let err = (v.value - want).norm();
            assert!(err < 1e-13 * want.norm(), "{a} {b} {cc} {z}: {} vs {want}", v.value);
            assert!(err <= v.error_bound + 4.0 * f64::EPSILON * want.norm(), "bound {} < err {err}", v.error_bound);
        }
    }

    #[test]
    fn transformation_agrees_with_series_in_overlap() {
        let inp = HypergeometricInput::real(0.3, 0.7, 1.4, 0.6).unwrap();
        let s = hyp2f1_series(&inp).unwrap();
        let t = hyp2f1_transformed(&inp).unwrap();
        assert!((s.value - t.value).norm() <= s.error_bound + t.error_bound);
    }

    #[test]
    fn transformation_at_zero_reduces_to_gauss_split() {
        // At z = 0 the left side is 1 and both sub-series sit at argument 1,
        // where Gauss summation applies when Re c < 1.
        for (a, b, cc) in [(0.3, 0.2, 0.8), (-0.4, 0.25, 0.6), (0.1, 0.55, 0.9)] {
            let (a, b, cc) = (c(a, 0.), c(b, 0.), c(cc, 0.));
            let s = cc - a - b;
            let p1 = gamma(cc).unwrap() * gamma(s).unwrap() * rgamma(cc - a) * rgamma(cc - b);
            let p2 = gamma(cc).unwrap() * gamma(-s).unwrap() * rgamma(a) * rgamma(b);
            let g1 = hyp2f1_at_one(a, b, 1.0 - s).unwrap();
            let g2 = hyp2f1_at_one(cc - a, cc - b, s + 1.0).unwrap();
            assert!((p1 * g1 + p2 * g2 - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn degenerate_parameters_rejected() {
        // c − a − b = 1
        let inp = HypergeometricInput::real(0.25, 0.25, 1.5, 0.7).unwrap();
        assert!(matches!(hyp2f1_transformed(&inp), Err(SpecfunError::Degenerate { .. })));
        // dispatcher falls back to the series
        let v = hyp2f1(&inp).unwrap();
        let s = hyp2f1_series(&inp).unwrap();
        assert_eq!(v.value, s.value);
    }

    #[test]
    fn swap_symmetry_is_bitwise() {
        let inp = HypergeometricInput::new(c(0.31, -0.2), c(1.7, 0.45), c(2.05, 0.1), c(0.3, 0.2)).unwrap();
        assert_eq!(hyp2f1(&inp).unwrap().value, hyp2f1(&inp.swapped()).unwrap().value);
        let inp = inp.with_z(c(0.8, 0.0));
        assert_eq!(hyp2f1(&inp).unwrap().value, hyp2f1(&inp.swapped()).unwrap().value);
    }
}
