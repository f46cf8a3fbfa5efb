//! The hypergeometric martingales `M^e` and `M^o` of the angle diffusion:
//! values on `[0, 2π]`, the boundary value `M^e(2π)`, and the generator
//! residual that makes `e^{λt} M(θ_t)` a local martingale.
//!
//!     cargo run --example martingales

use std::f64::consts::PI;

use cle_radii::martingales::{self, MartingaleParams};
use cle_radii::Kappa;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = Kappa::new(6.0)?;
    let even = MartingaleParams::even(k, -0.1);
    let odd = MartingaleParams::odd(k, -0.1);
    println!("{:>8} {:>16} {:>16} {:>12}", "theta", "M^e", "M^o", "residual");
    for i in 0..=8 {
        let th = 0.25 * PI * i as f64;
        let r = if (0.1..2.0 * PI - 0.1).contains(&th) {
            format!("{:.1e}", martingales::generator_residual(&even, th, 1e-3)?.norm())
        } else {
            "-".into()
        };
        println!("{th:>8.4} {:>16.12} {:>16.12} {r:>12}", even.eval(th)?.re, odd.eval(th)?.re);
    }
    let lambda = Complex64::new(-0.1, 0.0);
    println!("M^e(2π): series {:.14}, closed form {:.14}", even.eval(2.0 * PI)?.re, martingales::m_even_boundary(k, lambda).re);
    Ok(())
}
