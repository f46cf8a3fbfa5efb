//! Expected number of `ε`-balls needed to cover the gasket, up to constants,
//! and the exponent `α − 2` it grows with.
//!
//!     cargo run --example covering

use cle_radii::{gasket, lawlib, Kappa};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for kv in [3.2, 6.0, 7.5] {
        let k = Kappa::new(kv)?;
        let eps: Vec<f64> = (6..=14).map(|i| 2f64.powi(-i)).collect();
        let fit = gasket::covering_exponent(k, &eps)?;
        let g = lawlib::gasket_exponents(k);
        println!(
            "kappa {kv}: fitted exponent {:.4}, alpha − 2 = {:.4}, dimension {:.4}",
            fit.slope,
            g.alpha - 2.0,
            g.expectation_dimension
        );
    }
    let c = gasket::covering_sum(Kappa::new(6.0)?, 1e-3)?;
    println!("kappa 6, eps 1e-3: {:.4e} balls, local exponent {:.4}", c.expected_disk_count, c.exponent_fit);
    Ok(())
}
