//! Nested loops around the origin: `log CR` drops by an independent copy of
//! `B` at each level.
//!
//!     cargo run --release --example nested_radii

use cle_radii::diffusion::SimConfig;
use cle_radii::{gasket, lawlib, Kappa};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = Kappa::new(6.0)?;
    let depth = 10;
    let seqs = gasket::sample_nested_many(&SimConfig::new(k).with_seed(9), depth, 500, None)?;
    println!("one sequence: {:?}", seqs[0].log_cr.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>());
    let mean_last = seqs.iter().map(|s| s.log_cr[depth]).sum::<f64>() / seqs.len() as f64;
    println!("mean log CR after {depth} loops: {mean_last:.3} (−{depth}·E[B] = {:.3})", -(depth as f64) * lawlib::mean_b(k));
    Ok(())
}
