//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::io::Write;

use cle_radii::specfun::{self, HypergeometricInput};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `F(a, b; c; 1)` by Richardson elimination of the known powers
/// `w^s, w, w^{s+1}, w², …` (`s = c − a − b`) from the series at `z = 1 − w`,
/// `w = 2^{−k}`.
pub fn gauss_limit_by_extrapolation(a: Complex64, b: Complex64, cc: Complex64) -> Complex64 {
    let s = cc - a - b;
    let ks = 3..=12;
    let mut col: Vec<Complex64> = ks
        .map(|k| {
            let z = 1.0 - 2f64.powi(-k);
            specfun::hyp2f1_series(&HypergeometricInput::new(a, b, cc, c(z, 0.0)).unwrap()).unwrap().value
        })
        .collect();
    let mut powers = Vec::new();
    for j in 0..col.len() - 1 {
        powers.push(if j % 2 == 0 { s + (j / 2) as f64 } else { c((j / 2 + 1) as f64, 0.0) });
    }
    for p in powers {
        // halving w multiplies w^p by 2^{−p}
        let r = Complex64::new(2.0, 0.0).powc(-p);
        col = col.windows(2).map(|v| (v[1] - r * v[0]) / (1.0 - r)).collect();
    }
    col[0]
}

/// One line on the real stderr, past the test harness's output capture.
pub fn report(line: &str) {
    let mut e = std::io::stderr().lock();
    let _ = writeln!(e, "{line}");
}
