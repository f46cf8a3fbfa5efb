//! The command line driven in-process: a law table, a short simulation and
//! its verification report.
//!
//!     cargo run --release --example cli_tour

use cle_radii::cli;

fn run(args: &[&str]) -> i32 {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::main_with_args(std::iter::once("cle-radii").chain(args.iter().copied()), &mut out, &mut err);
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    code
}

fn main() {
    println!("exit {}", run(&["law", "--kappa", "6", "--what", "density", "--grid", "1:10:4"]));
    println!("exit {}", run(&["law", "--kappa", "6", "--what", "mgf", "--lambda", "-0.0833333333333333"]));
    println!("exit {}", run(&["gasket", "--kappa", "6", "--mode", "covering"]));
    println!("exit {}", run(&["law", "--kappa", "9", "--what", "mean"]));
}
