//! Large-depth moment generating function of the electrical thickness and
//! the location of its first pole.
//!
//!     cargo run --example thickness

use cle_radii::{lawlib, Kappa};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for kv in [3.0, 4.0, 6.0, 7.5] {
        let k = Kappa::new(kv)?;
        let pole = lawlib::thickness_pole(k);
        let vals: Vec<String> = [-1.0, 0.0, 0.5 * pole, 0.99 * pole]
            .iter()
            .map(|&l| format!("{:.5}", lawlib::thickness_mgf(k, Complex64::new(l, 0.0)).unwrap().re))
            .collect();
        println!("kappa {kv}: pole {pole:.5}, values at −1, 0, pole/2, 0.99 pole: {}", vals.join(" "));
    }
    Ok(())
}
