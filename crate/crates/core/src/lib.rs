//! Laws of nested conformal radii in conformal loop ensembles.
//!
//! The crate pairs two independent routes to the same distributions:
//!
//! * closed forms: the hypergeometric martingales ([`martingales`]), the
//!   density, CDF and moment generating function of the log-conformal-radius
//!   decrement, and the gasket exponent ([`lawlib`]);
//! * a Monte Carlo simulator of the reflected diffusion
//!   `dθ = ((κ−4)/2) cot(θ/2) dt + √κ dB` whose hitting time of `2π` carries
//!   the same law ([`diffusion`], [`gasket`]);
//!
//! and the statistics that compare them ([`stats`]). The [`cli`] module backs
//! the `cle-radii` binary.

pub mod cli;
pub mod diffusion;
pub mod gasket;
mod kappa;
pub mod lawlib;
pub mod martingales;
pub mod specfun;
pub mod stats;

pub use kappa::{Kappa, KappaError};
