//! Monte Carlo check that `e^{λ t̄} M^e(θ_{t̄})` keeps its mean along the
//! stopped diffusion.
//!
//!     cargo run --release --example martingale_check

use std::f64::consts::PI;

use cle_radii::diffusion::{self, SimConfig};
use cle_radii::martingales::MartingaleParams;
use cle_radii::Kappa;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (kv, lambda, th) in [(6.0, -0.1, 0.0), (3.0, -0.1, PI), (7.0, -0.05, PI / 2.0)] {
        let k = Kappa::new(kv)?;
        let cfg = SimConfig::new(k).with_theta0(th).with_seed(4);
        let start = MartingaleParams::even(k, lambda).eval(th)?.re;
        let est = diffusion::path_functional_martingale(&cfg, Complex64::new(lambda, 0.0), &[0.0, 2.0, 5.0, 10.0, 20.0], 2000, None)?;
        println!("kappa {kv}, lambda {lambda}, theta0 {th:.3}: M(theta0) = {start:.5}");
        for e in est {
            println!("  t {:>4}: {:.5} ± {:.5}", e.t, e.mean.re, e.std_error);
        }
    }
    Ok(())
}
