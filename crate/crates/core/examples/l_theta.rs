//! `L(θ)`, the mean first point of `2πℤ` reached by the lifted diffusion,
//! from the closed form and from simulation; plus its power law at 0.
//!
//!     cargo run --release --example l_theta

use std::f64::consts::PI;

use cle_radii::diffusion::{self, SimConfig};
use cle_radii::martingales;
use cle_radii::Kappa;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 4000;
    for kv in [3.0, 6.0] {
        let k = Kappa::new(kv)?;
        for th in [PI / 2.0, PI, 1.5 * PI] {
            let hits = diffusion::sample_first_hit_batch(&SimConfig::new(k).with_theta0(th), n, None)?;
            let v: Vec<f64> = hits.iter().map(|h| h.theta).collect();
            let mean = v.iter().sum::<f64>() / n as f64;
            let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
            println!(
                "kappa {kv} theta0 {th:.4}: L = {:.4}, simulated {mean:.4} ± {:.4}",
                martingales::l_theta(k, th),
                sd / (n as f64).sqrt()
            );
        }
        let c = martingales::l_small_constant(k);
        let t = 1e-4;
        println!(
            "  near 0: L({t}) = {:.6e}, c θ^(8/κ−1) = {:.6e}",
            martingales::l_theta_small(k, t)?,
            c * (t / 2.0).powf(martingales::l_small_theta_exponent(k))
        );
    }
    Ok(())
}
