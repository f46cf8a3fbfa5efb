//! The one-arm diffusion `dθ = cot(θ/2) dt + √κ' dB` is a time change of the
//! main diffusion at `κ = 4κ'/(κ' − 2)`; compare the two by simulation.
//!
//!     cargo run --release --example one_arm

use cle_radii::diffusion::{self, SimConfig};
use cle_radii::{lawlib, Kappa};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 4000;
    for kp in [6.0, 10.0] {
        let (k, speed) = diffusion::one_arm_equivalent(kp)?;
        let cfg = SimConfig::new(Kappa::new(kp.min(7.9))?).with_one_arm(kp)?.with_seed(5);
        let batch = diffusion::sample_exit_batch(&cfg, n)?;
        println!(
            "kappa' {kp}: equivalent kappa {:.4}, speed {speed:.3}; one-arm mean {:.3} ± {:.3}, predicted {:.3}",
            k.value(),
            batch.law.mean(),
            batch.law.std_error(),
            speed * lawlib::mean_b(k)
        );
    }
    Ok(())
}
