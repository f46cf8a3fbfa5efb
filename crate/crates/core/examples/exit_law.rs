//! Density, CDF, survival and moment generating function of the
//! log-conformal-radius decrement `B` for CLE_6.
//!
//!     cargo run --example exit_law

use cle_radii::lawlib;
use cle_radii::Kappa;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = Kappa::new(6.0)?;
    println!("E[B] = {:.6} (2√3π = {:.6})", lawlib::mean_b(k), 2.0 * 3f64.sqrt() * std::f64::consts::PI);
    let g = lawlib::gasket_exponents(k);
    println!("alpha = {:.6}, expectation dimension = {:.6}", g.alpha, g.expectation_dimension);

    println!("{:>6} {:>14} {:>14} {:>14}", "x", "density", "cdf", "survival");
    for x in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0] {
        let d = lawlib::density_b(k, x)?;
        println!("{x:>6} {:>14.6e} {:>14.10} {:>14.6e}", d.re(), lawlib::cdf_b(k, x)?, lawlib::survival_b(k, x)?);
    }

    for l in [-2.0, -1.0, -1.0 / 12.0, 0.0, 0.1] {
        let m = lawlib::mgf_b(k, Complex64::new(l, 0.0))?;
        println!("E[exp({l:.4} B)] = {:.12}", m.re);
    }
    match lawlib::mgf_b(k, Complex64::new(0.2, 0.0)) {
        Err(e) => println!("lambda = 0.2: {e}"),
        Ok(v) => println!("lambda = 0.2: {v}"),
    }
    Ok(())
}
