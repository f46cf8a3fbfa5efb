//! Write an exit-sample file with its manifest, read it back, and run the
//! verification gates on it.
//!
//!     cargo run --release --example sample_file

use cle_radii::cli::{self, verify_law};
use cle_radii::Kappa;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("cle-radii-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("kappa6.csv");
    let path_arg = path.to_string_lossy().into_owned();

    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = ["cle-radii", "simulate", "--kappa", "6", "--n", "4000", "--seed", "3", "--output", &path_arg];
    let code = cli::main_with_args(args, &mut out, &mut err);
    println!("simulate exited with {code}");

    let (manifest, samples) = cli::read_sample_file(&path)?;
    println!("manifest digest {}", manifest.digest.as_deref().unwrap_or("-"));
    println!("first rows: {:?}", &samples[..3]);

    let law = cle_radii::stats::EmpiricalLaw::new(samples.iter().map(|s| s.exit_time).collect(), "example")?;
    for kv in [6.0, 3.0] {
        let r = verify_law(Kappa::new(kv)?, &law)?;
        println!("against kappa {kv}: KS {:.4} / {:.4}, mean z {:.2}, pass {}", r.ks.statistic, r.ks.threshold, r.mean.z, r.pass);
    }
    Ok(())
}
