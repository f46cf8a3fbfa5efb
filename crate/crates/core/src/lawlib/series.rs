//! Alternating exponential series `Σ_{j≥0} (−1)^j t_j` with `t_j ≥ 0`.
//!
//! All the series used for the exit-time law have magnitudes of the form
//! `w_j · exp(−β_j x)` with `β_j` growing quadratically, so the term ratio
//! `t_{j+1}/t_j` is eventually decreasing. Once it drops below one the tail
//! is bounded by a geometric series in the last observed ratio.

use crate::specfun::SeriesValue;

const NEGLIGIBLE: f64 = 1e-16;
const NEGLIGIBLE_RUN: usize = 3;
const MAX_TERMS: usize = 100_000;

pub(crate) fn alternating_sum<F: Fn(usize) -> f64>(term: F) -> SeriesValue {
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut prev = f64::NAN;
    let mut run = 0;
    let mut j = 0;
    loop {
        let t = term(j);
        debug_assert!(t >= 0.0);
        sum += if j % 2 == 0 { t } else { -t };
        abs_sum += t;
        j += 1;
        let rounding = 4.0 * f64::EPSILON * abs_sum;
        if t == 0.0 && j > 1 {
            return SeriesValue::real(sum, rounding, j);
        }
        if t < NEGLIGIBLE * sum.abs() || t < 1e-300 {
            run += 1;
        } else {
            run = 0;
        }
        let ratio = t / prev;
        if run >= NEGLIGIBLE_RUN && ratio < 1.0 {
            return SeriesValue::real(sum, t * ratio / (1.0 - ratio) + rounding, j);
        }
        if j >= MAX_TERMS {
            // not reached for the series in this crate; report the crude tail
            return SeriesValue::real(sum, t + rounding, j);
        }
        prev = t;
    }
}
