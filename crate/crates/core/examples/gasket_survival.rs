//! Tail of the first log-conformal radius: `Pr[B > s] ≍ exp(−α s)`, so the
//! chance that the first loop comes within `ε` of a point is `≍ ε^α`.
//!
//!     cargo run --release --example gasket_survival

use cle_radii::diffusion::SimConfig;
use cle_radii::{gasket, lawlib, Kappa};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = Kappa::new(6.0)?;
    let grid: Vec<f64> = (1..=8).map(|i| 5.0 * i as f64).collect();
    let curve = gasket::survival_curve(&SimConfig::new(k).with_seed(2), &grid, 20_000, None)?;
    for p in &curve.points {
        println!(
            "s {:>5}: {:.5} ± {:.5} (exact {:.5}){}",
            p.s,
            p.estimate,
            p.std_error,
            p.closed_form,
            if p.degenerate { " few survivors" } else { "" }
        );
    }
    if let Some(f) = curve.fit {
        println!("log-slope {:.4} ± {:.4}, −alpha = {:.4}", f.slope, f.std_error, -lawlib::gasket_exponents(k).alpha);
    }
    Ok(())
}
