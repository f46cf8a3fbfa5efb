//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands
//! on finite intervals, plus interval doubling for `[a, ∞)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not reach tolerance {tol:e} (estimated error {error:e}) within {intervals} intervals")]
    NoConvergence { tol: f64, error: f64, intervals: usize },
    #[error("tail did not decay below {tol:e} after {panels} doublings (last panel {last:e})")]
    TailNotConverged { tol: f64, panels: usize, last: f64 },
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFinite(f64),
    #[error("invalid interval [{0}, {1}]")]
    BadInterval(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Result<Panel, QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !(fc.re.is_finite() && fc.im.is_finite()) {
        return Err(QuadError::NonFinite(center));
    }
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = half * XGK[i];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        for (x, v) in [(x1, f1), (x2, f2)] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(QuadError::NonFinite(x));
            }
        }
        kron += (f1 + f2) * WGK[i];
        if i % 2 == 1 {
            gauss += (f1 + f2) * WG[i / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).norm();
    Ok(Panel { a, b, value, error })
}

/// Integrate `f` over `[a, b]` until the estimated error is below
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult, QuadError> {
    const MAX_PANELS: usize = 4000;
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(QuadError::BadInterval(a, b));
    }
    if a == b {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 });
    }
    let first = kronrod(&f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut evals = 15;

    while total_err > abs_tol.max(rel_tol * total.norm()) {
        if heap.len() >= MAX_PANELS {
            return Err(QuadError::NoConvergence {
                tol: abs_tol.max(rel_tol * total.norm()),
                error: total_err,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution
            heap.push(worst);
            break;
        }
        let left = kronrod(&f, worst.a, mid)?;
        let right = kronrod(&f, mid, worst.b)?;
        evals += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed the drift of the running updates
    let value = heap.iter().fold(Complex64::new(0.0, 0.0), |acc, p| acc + p.value);
    let error = heap.iter().map(|p| p.error).sum();
    Ok(QuadResult { value, error, evaluations: evals })
}

pub fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64), QuadError> {
    let r = integrate(|x| Complex64::new(f(x), 0.0), a, b, abs_tol, rel_tol)?;
    Ok((r.value.re, r.error))
}

/// Integrate over `[a, ∞)` as `[a, a+w] ∪ [a+w, a+2w] ∪ [a+2w, a+4w] ∪ …`,
/// stopping once two consecutive panels contribute less than `tol / 10`.
pub fn integrate_to_infinity<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    width: f64,
    tol: f64,
) -> Result<QuadResult, QuadError> {
    const MAX_DOUBLINGS: usize = 60;
    if !(width > 0.0) {
        return Err(QuadError::BadInterval(a, a + width));
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut lo = a;
    let mut w = width;
    let mut quiet = 0;
    let mut last = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        let hi = lo + w;
        let r = integrate(&f, lo, hi, tol * 0.05, 1e-14)?;
        total += r.value;
        error += r.error;
        evaluations += r.evaluations;
        last = r.value.norm() + r.error;
        if last < tol * 0.1 {
            quiet += 1;
            if quiet >= 2 {
                return Ok(QuadResult { value: total, error: error + last, evaluations });
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        w *= 2.0;
    }
    Err(QuadError::TailNotConverged { tol, panels: MAX_DOUBLINGS, last })
}
