//! The Gauss hypergeometric function with complex parameters: direct
//! series, Gauss's sum at `z = 1`, and the `z → 1 − z` connection formula.
//!
//!     cargo run --example hypergeometric

use cle_radii::specfun::{self, HypergeometricInput};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = |re, im| Complex64::new(re, im);

    let inp = HypergeometricInput::new(c(0.5, 0.3), c(1.25, -0.4), c(2.1, 0.2), c(0.45, 0.0))?;
    let direct = specfun::hyp2f1_series(&inp)?;
    let moved = specfun::hyp2f1_transformed(&inp)?;
    println!("2F1 at z = 0.45: series {:.15}  connection {:.15}", direct.value, moved.value);
    println!("  error bounds {:.1e} / {:.1e}", direct.error_bound, moved.error_bound);

    let (a, b, cc) = (c(0.2, 0.1), c(0.3, -0.2), c(1.7, 0.05));
    let gauss = specfun::hyp2f1_at_one(a, b, cc)?;
    let near = specfun::hyp2f1(&HypergeometricInput::new(a, b, cc, c(1.0 - 1e-9, 0.0))?)?;
    println!("Gauss sum F(a,b;c;1) = {:.12}, series at 1 − 1e−9 = {:.12}", gauss, near.value);

    // Γ(z) Γ(1 − z) = π / sin(πz)
    let z = c(0.3, 0.7);
    let lhs = specfun::gamma(z)? * specfun::gamma(Complex64::new(1.0, 0.0) - z)?;
    let rhs = std::f64::consts::PI / specfun::sin_pi_complex(z);
    println!("reflection: {lhs:.15} vs {rhs:.15}");

    match HypergeometricInput::real(1.0, 1.0, -2.0, 0.5) {
        Err(e) => println!("c = −2: {e}"),
        Ok(_) => println!("c = −2 accepted"),
    }
    Ok(())
}
