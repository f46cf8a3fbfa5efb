//! Complex Gamma function.
//!
//! Lanczos approximation (g = 607/128, 15 terms) on the right half-plane,
//! reflection `Γ(z)Γ(1−z) = π / sin(πz)` for `Re z < 1/2`.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::SpecfunError;

const LANCZOS_G: f64 = 607.0 / 128.0;

const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Returns `true` when `z` sits on a pole of Γ (0, −1, −2, …).
pub fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `sin(πx)` with the argument reduced before multiplying by π, so that
/// integers give exact zeros.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]
    if r == 0.0 || r.abs() == 1.0 {
        0.0
    } else if r.abs() == 0.5 {
        r.signum()
    } else {
        (PI * r).sin()
    }
}

/// `cos(πx)` with argument reduction.
pub fn cos_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r.abs() == 0.5 {
        0.0
    } else if r == 0.0 {
        1.0
    } else if r.abs() == 1.0 {
        -1.0
    } else {
        (PI * r).cos()
    }
}

/// Complex `sin(πz)`.
pub fn sin_pi_complex(z: Complex64) -> Complex64 {
    let py = PI * z.im;
    Complex64::new(sin_pi(z.re) * py.cosh(), cos_pi(z.re) * py.sinh())
}

fn lanczos(z: Complex64) -> Complex64 {
    // valid for Re z >= 1/2
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    let log_pow = (zm1 + 0.5) * t.ln() - t;
    SQRT_2PI * log_pow.exp() * acc
}

/// Complex Gamma function.
pub fn gamma(z: Complex64) -> Result<Complex64, SpecfunError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(SpecfunError::NonFinite("gamma argument"));
    }
    if is_nonpositive_integer(z) {
        return Err(SpecfunError::GammaPole(z.re));
    }
    if z.re < 0.5 {
        let s = sin_pi_complex(z);
        Ok(PI / (s * lanczos(1.0 - z)))
    } else {
        Ok(lanczos(z))
    }
}

/// `1/Γ(z)`, entire: zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        sin_pi_complex(z) * lanczos(1.0 - z) / PI
    } else {
        1.0 / lanczos(z)
    }
}

/// Real Gamma function (thin wrapper used for the many real constants).
pub fn gamma_real(x: f64) -> Result<f64, SpecfunError> {
    gamma(Complex64::new(x, 0.0)).map(|g| g.re)
}
