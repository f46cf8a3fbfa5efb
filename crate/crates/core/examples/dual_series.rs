//! The two series for the Brownian exit density `f_κ`: eigenfunction
//! expansion and method of images. They agree to rounding; each is cheap
//! on its own side of `κx = 8`.
//!
//!     cargo run --example dual_series

use cle_radii::lawlib;
use cle_radii::Kappa;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for kv in [3.0, 4.5, 6.0, 7.5] {
        let k = Kappa::new(kv)?;
        println!("kappa = {kv}");
        for x in [0.3, 0.8, 1.5, 3.0] {
            let s = lawlib::f_kappa_spectral(k, x)?;
            let h = lawlib::f_kappa_heat(k, x)?;
            println!(
                "  x = {x:<4} spectral {:.15e} ({:>3} terms)  images {:.15e} ({:>2} terms)  diff {:.1e}",
                s.re(),
                s.terms_used,
                h.re(),
                h.terms_used,
                (s.re() - h.re()).abs()
            );
        }
    }
    Ok(())
}
