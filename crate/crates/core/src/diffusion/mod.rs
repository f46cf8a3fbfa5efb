//! Monte Carlo simulation of the reflected diffusion
//! `dθ = ((κ−4)/2) cot(θ/2) dt + √κ dB` on `[0, 2π]` and of its lift to ℝ.
//!
//! The default scheme is a Strang splitting around the nearer endpoint
//! `e ∈ {0, 2π}`. With `x = |θ − e|` the drift is
//! `(κ−4)/x + ((κ−4)/2)(cot(x/2) − 2/x)`: the first part together with the
//! noise is a Bessel process of dimension `(3κ−8)/κ` in `x/√κ`, advanced by its
//! exact transition (so reflection at 0 needs no special treatment), and the
//! second part is smooth and advanced by RK2 half-steps on either side.
//! Whether the path touched the endpoint during the Bessel step is sampled
//! from the exact bridge probability; that is how the hitting time of `2π`
//! is detected and how the fair coin of the lift is re-tossed at every visit
//! to 0.
//!
//! A plain adaptive Euler scheme built on [`step`] is kept for comparison.

mod bessel;
pub mod io;
pub mod rng;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use bessel::BesselKernel;
pub use rng::RNG_VERSION;

use crate::lawlib;
use crate::martingales::{MartingaleError, MartingaleParams};
use crate::stats::{EmpiricalLaw, StatsError};
use crate::Kappa;

const TWO_PI: f64 = 2.0 * PI;

pub const DEFAULT_DT_MAX: f64 = 1e-2;
pub const DEFAULT_DT_FLOOR: f64 = 1e-9;
/// Largest step accepted; beyond it a single step could cross the interval.
pub const DT_LIMIT: f64 = 0.05;
/// Default `c` in the Euler step policy `dt = clamp(c·dist², dt_floor, dt_max)`.
pub const EULER_STEP_CONSTANT: f64 = 0.05;
/// Distance to a level `2πk` below which the Euler scheme takes exact
/// Bessel steps instead.
pub const EULER_BESSEL_RADIUS: f64 = 1e-3;
/// Default censoring horizon in units of the mean exit time.
pub const HORIZON_MEANS: f64 = 1e4;
/// Largest tolerated fraction of censored samples in an exit batch.
pub const MAX_CENSORED_FRACTION: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("path did not exit before max_time = {max_time} ({steps} steps)")]
    MaxTimeExceeded { max_time: f64, steps: u64 },
    #[error("{censored} of {n} samples exceeded max_time = {max_time}")]
    Censored { censored: usize, n: usize, max_time: f64 },
    #[error("Re(lambda) = {0} must be ≤ 0")]
    PositiveLambda(f64),
    #[error(transparent)]
    Martingale(#[from] MartingaleError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Exact Bessel steps with a split smooth drift.
    Split,
    /// Euler–Maruyama with capped drift and `dt = c·dist²`, exact Bessel
    /// steps within [`EULER_BESSEL_RADIUS`] of a level. Biased by O(c) for
    /// κ > 4.
    AdaptiveEuler,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Split => "split",
            Scheme::AdaptiveEuler => "adaptive-euler",
        })
    }
}

impl FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "split" => Ok(Scheme::Split),
            "adaptive-euler" => Ok(Scheme::AdaptiveEuler),
            _ => Err(format!("unknown scheme {s:?} (expected split or adaptive-euler)")),
        }
    }
}

/// `dθ = drift·cot(θ/2) dt + √sigma2 dB`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dynamics {
    pub drift: f64,
    pub sigma2: f64,
}

impl Dynamics {
    pub fn main(kappa: Kappa) -> Self {
        Self { drift: (kappa.value() - 4.0) / 2.0, sigma2: kappa.value() }
    }

    /// `dθ = cot(θ/2) dt + √κ' dB`. For `4 < κ < 8` this is the main
    /// diffusion at `κ' = 2κ/(κ−4)` run at speed `(κ−4)/2`.
    pub fn one_arm(kappa_prime: f64) -> Result<Self, SimError> {
        if !(kappa_prime > 4.0 && kappa_prime.is_finite()) {
            return Err(SimError::InvalidConfig(format!("one-arm parameter must exceed 4, got {kappa_prime}")));
        }
        Ok(Self { drift: 1.0, sigma2: kappa_prime })
    }

    /// Dimension `1 + 4·drift/sigma2` of the Bessel process seen near `2πℤ`.
    pub fn bessel_dimension(&self) -> f64 {
        1.0 + 4.0 * self.drift / self.sigma2
    }
}

/// The main-diffusion parameter and time factor equivalent to the one-arm
/// diffusion with parameter `κ'`: hitting times of the latter are
/// `(κ−4)/2` times those of the former, `κ = 4κ'/(κ'−2)`.
pub fn one_arm_equivalent(kappa_prime: f64) -> Result<(Kappa, f64), SimError> {
    Dynamics::one_arm(kappa_prime)?;
    let k = Kappa::new(4.0 * kappa_prime / (kappa_prime - 2.0))
        .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
    Ok((k, (k.value() - 4.0) / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub kappa: Kappa,
    /// Starting point in lifted coordinates.
    pub theta0: f64,
    pub dt_max: f64,
    pub dt_floor: f64,
    /// `c` of the Euler step policy; unused by the split scheme.
    pub euler_step_constant: f64,
    pub seed: u64,
    pub max_time: f64,
    pub scheme: Scheme,
    dynamics: Dynamics,
}

impl SimConfig {
    pub fn new(kappa: Kappa) -> Self {
        Self {
            kappa,
            theta0: 0.0,
            dt_max: DEFAULT_DT_MAX,
            dt_floor: DEFAULT_DT_FLOOR,
            euler_step_constant: EULER_STEP_CONSTANT,
            seed: 1,
            max_time: HORIZON_MEANS * lawlib::mean_b(kappa),
            scheme: Scheme::Split,
            dynamics: Dynamics::main(kappa),
        }
    }

    pub fn with_theta0(self, theta0: f64) -> Self {
        Self { theta0, ..self }
    }
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
    pub fn with_dt_max(self, dt_max: f64) -> Self {
        Self { dt_max, ..self }
    }
    pub fn with_dt_floor(self, dt_floor: f64) -> Self {
        Self { dt_floor, ..self }
    }
    pub fn with_euler_step_constant(self, euler_step_constant: f64) -> Self {
        Self { euler_step_constant, ..self }
    }
    pub fn with_max_time(self, max_time: f64) -> Self {
        Self { max_time, ..self }
    }
    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }

    /// Replace the dynamics by the one-arm diffusion with parameter `κ'`.
    /// `kappa` is kept only for bookkeeping.
    pub fn with_one_arm(self, kappa_prime: f64) -> Result<Self, SimError> {
        Ok(Self { dynamics: Dynamics::one_arm(kappa_prime)?, ..self })
    }

    pub fn dynamics(&self) -> Dynamics {
        self.dynamics
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        if !(self.dt_max > 0.0 && self.dt_max <= DT_LIMIT) {
            return bad(format!("dt_max must lie in (0, {DT_LIMIT}], got {}", self.dt_max));
        }
        if !(self.dt_floor > 0.0 && self.dt_floor <= self.dt_max) {
            return bad(format!("dt_floor must lie in (0, dt_max], got {}", self.dt_floor));
        }
        if !(self.euler_step_constant > 0.0 && self.euler_step_constant.is_finite()) {
            return bad(format!("Euler step constant must be positive, got {}", self.euler_step_constant));
        }
        if !(self.max_time > 0.0 && self.max_time.is_finite()) {
            return bad(format!("max_time must be positive and finite, got {}", self.max_time));
        }
        if !self.theta0.is_finite() {
            return bad(format!("theta0 must be finite, got {}", self.theta0));
        }
        let d = self.dynamics.bessel_dimension();
        if !(d > 0.0 && d < 2.0) {
            return bad(format!("Bessel dimension {d} outside (0, 2)"));
        }
        Ok(())
    }

    /// SHA-256 of everything that determines a batch of `n` samples.
    pub fn digest(&self, n: usize) -> String {
        let text = format!(
            "kappa={:?};theta0={:?};dt_max={:?};dt_floor={:?};euler_c={:?};seed={};max_time={:?};scheme={};drift={:?};sigma2={:?};n={};rng={}",
            self.kappa.value(),
            self.theta0,
            self.dt_max,
            self.dt_floor,
            self.euler_step_constant,
            self.seed,
            self.max_time,
            self.scheme,
            self.dynamics.drift,
            self.dynamics.sigma2,
            n,
            RNG_VERSION
        );
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Fold `R`: reduce mod `4π` into `[−2π, 2π]`, then take the absolute value.
pub fn lift_fold(theta: f64) -> f64 {
    let r = theta - 2.0 * TWO_PI * (theta / (2.0 * TWO_PI)).round();
    r.abs().min(TWO_PI)
}

/// Distance from `θ` to the nearest point of `2πℤ`.
pub fn distance_to_singular(theta: f64) -> f64 {
    (theta - TWO_PI * (theta / TWO_PI).round()).abs()
}

/// One Euler–Maruyama update in lifted coordinates. The drift increment is
/// capped at half the distance to the nearest level `2πk`; the folded path
/// `R(θ)` reflects wherever the update crosses such a level.
pub fn step(theta: f64, dt: f64, noise: f64, kappa: Kappa) -> f64 {
    step_dynamics(theta, dt, noise, Dynamics::main(kappa))
}

fn step_dynamics(theta: f64, dt: f64, noise: f64, dynamics: Dynamics) -> f64 {
    let cap = 0.5 * distance_to_singular(theta);
    let drift = if dynamics.drift == 0.0 {
        0.0
    } else {
        (dynamics.drift * cot_half(theta) * dt).clamp(-cap, cap)
    };
    theta + drift + (dynamics.sigma2 * dt).sqrt() * noise
}

fn cot_half(theta: f64) -> f64 {
    let h = 0.5 * theta;
    h.cos() / h.sin()
}

/// `cot(x/2) − 2/x`, smooth on `[0, 2π)`.
fn cot_remainder(x: f64) -> f64 {
    if x < 0.05 {
        let x2 = x * x;
        -x * (1.0 / 6.0 + x2 * (1.0 / 360.0 + x2 / 15120.0))
    } else {
        cot_half(x) - 2.0 / x
    }
}

/// A completed passage to `±2π` (lifted) from a start in `(−2π, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitSample {
    pub exit_time: f64,
    /// `+1` for `+2π`, `−1` for `−2π`.
    pub exit_side: i8,
    pub steps: u64,
    /// Index of the random streams within the run's master seed.
    pub seed_index: u64,
}

/// First point of `2πℤ` reached from a start off that set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstHit {
    pub time: f64,
    /// Lifted value `θ_T ∈ 2πℤ`.
    pub theta: f64,
    pub steps: u64,
}

/// A recorded trajectory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiffusionPath {
    pub times: Vec<f64>,
    /// Lifted coordinates.
    pub thetas: Vec<f64>,
    /// Sign of the lift chosen at each visit to 0.
    pub coin_flips: Vec<i8>,
    pub exit: Option<ExitSample>,
}

impl DiffusionPath {
    /// Fraction of recorded points whose fold lies within `tol` of `{0, 2π}`.
    pub fn boundary_fraction(&self, tol: f64) -> f64 {
        if self.thetas.is_empty() {
            return 0.0;
        }
        let hits = self
            .thetas
            .iter()
            .map(|&t| lift_fold(t))
            .filter(|&r| r < tol || r > TWO_PI - tol)
            .count();
        hits as f64 / self.thetas.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    /// Reflect at 0 (re-tossing the lift coin), absorb at `2π`.
    Exit,
    /// Absorb at both 0 and `2π`.
    FirstHit,
}

enum Advance {
    Running,
    Absorbed { time: f64, at_top: bool },
}

/// State of one path: the folded position in `[0, 2π]` plus the lift.
struct Walker {
    dynamics: Dynamics,
    sigma: f64,
    kernel: BesselKernel,
    scheme: Scheme,
    mode: Mode,
    dt_max: f64,
    dt_floor: f64,
    euler_c: f64,
    noise: ChaCha8Rng,
    coins: ChaCha8Rng,
    /// Folded coordinate (split scheme) or lifted coordinate (Euler scheme).
    theta: f64,
    sign: f64,
    base: f64,
    t: f64,
    steps: u64,
    path: Option<DiffusionPath>,
}

impl Walker {
    fn new(cfg: &SimConfig, index: u64, mode: Mode, record: bool) -> Result<Self, SimError> {
        cfg.validate()?;
        let dynamics = cfg.dynamics;
        let kernel = BesselKernel::new(dynamics.bessel_dimension()).expect("validated dimension");
        let mut w = Self {
            dynamics,
            sigma: dynamics.sigma2.sqrt(),
            kernel,
            scheme: cfg.scheme,
            mode,
            dt_max: cfg.dt_max,
            dt_floor: cfg.dt_floor,
            euler_c: cfg.euler_step_constant,
            noise: rng::noise_stream(cfg.seed, index),
            coins: rng::coin_stream(cfg.seed, index),
            theta: 0.0,
            sign: 1.0,
            base: 0.0,
            t: 0.0,
            steps: 0,
            path: record.then(DiffusionPath::default),
        };
        match (mode, cfg.scheme) {
            (Mode::Exit, Scheme::Split) => {
                if cfg.theta0.abs() > TWO_PI {
                    return Err(SimError::InvalidConfig(format!("theta0 = {} outside [−2π, 2π]", cfg.theta0)));
                }
                w.theta = cfg.theta0.abs();
                if cfg.theta0 == 0.0 {
                    w.toss();
                } else {
                    w.sign = cfg.theta0.signum();
                }
            }
            (Mode::Exit, Scheme::AdaptiveEuler) => {
                if cfg.theta0.abs() > TWO_PI {
                    return Err(SimError::InvalidConfig(format!("theta0 = {} outside [−2π, 2π]", cfg.theta0)));
                }
                w.theta = cfg.theta0;
            }
            (Mode::FirstHit, Scheme::Split) => {
                w.base = TWO_PI * (cfg.theta0 / TWO_PI).floor();
                w.theta = cfg.theta0 - w.base;
            }
            (Mode::FirstHit, Scheme::AdaptiveEuler) => {
                return Err(SimError::InvalidConfig("first-hit sampling needs the split scheme".into()));
            }
        }
        w.record();
        Ok(w)
    }

    fn toss(&mut self) {
        self.sign = if self.coins.random::<bool>() { 1.0 } else { -1.0 };
        if let Some(p) = self.path.as_mut() {
            p.coin_flips.push(self.sign as i8);
        }
    }

    fn lifted(&self) -> f64 {
        match (self.scheme, self.mode) {
            (Scheme::AdaptiveEuler, _) => self.theta,
            (Scheme::Split, Mode::Exit) => self.sign * self.theta,
            (Scheme::Split, Mode::FirstHit) => self.base + self.theta,
        }
    }

    /// Folded position in `[0, 2π]`.
    fn folded(&self) -> f64 {
        match self.scheme {
            Scheme::AdaptiveEuler => lift_fold(self.theta),
            Scheme::Split => self.theta,
        }
    }

    fn record(&mut self) {
        let (t, th) = (self.t, self.lifted());
        if let Some(p) = self.path.as_mut() {
            p.times.push(t);
            p.thetas.push(th);
        }
    }

    /// Already sitting on an absorbing point at the start.
    fn absorbed_at_start(&self) -> Option<bool> {
        match self.scheme {
            Scheme::Split => {
                if self.theta >= TWO_PI {
                    Some(true)
                } else if self.mode == Mode::FirstHit && self.theta <= 0.0 {
                    Some(false)
                } else {
                    None
                }
            }
            Scheme::AdaptiveEuler => (self.theta.abs() >= TWO_PI).then_some(true),
        }
    }

    fn flow(&self, x: f64, tau: f64) -> f64 {
        let a = self.dynamics.drift;
        let mid = x + 0.5 * tau * a * cot_remainder(x);
        (x + tau * a * cot_remainder(mid.max(0.0))).max(0.0)
    }

    fn advance(&mut self, dt: f64) -> Advance {
        self.steps += 1;
        let out = match self.scheme {
            Scheme::Split => self.split_step(dt),
            Scheme::AdaptiveEuler => self.euler_step(dt),
        };
        if let Advance::Running = out {
            self.t += dt;
            self.record();
        }
        out
    }

    fn split_step(&mut self, dt: f64) -> Advance {
        let at_top = self.theta > PI;
        let x = if at_top { TWO_PI - self.theta } else { self.theta };
        let x1 = self.flow(x, 0.5 * dt);
        let y1 = x1 / self.sigma;
        let y2 = self.kernel.step(y1, dt, &mut self.noise);
        let p = self.kernel.bridge_hit_probability(y1, y2, dt);
        let absorbing = at_top || self.mode == Mode::FirstHit;
        if p > 0.0 {
            if absorbing {
                if self.noise.random::<f64>() < p {
                    return Advance::Absorbed { time: self.t + 0.5 * dt, at_top };
                }
            } else if self.coins.random::<f64>() < p {
                self.toss();
            }
        }
        let x3 = self.flow(y2 * self.sigma, 0.5 * dt);
        let next = if at_top { TWO_PI - x3 } else { x3 };
        if next >= TWO_PI {
            return Advance::Absorbed { time: self.t + dt, at_top: true };
        }
        if next <= 0.0 {
            if self.mode == Mode::FirstHit {
                return Advance::Absorbed { time: self.t + dt, at_top: false };
            }
            self.toss();
            self.theta = -next;
        } else {
            self.theta = next;
        }
        Advance::Running
    }

    fn euler_step(&mut self, dt: f64) -> Advance {
        if distance_to_singular(self.theta) < EULER_BESSEL_RADIUS {
            // exact Bessel step on |θ|, then lift back with the current sign
            if self.theta == 0.0 {
                self.toss();
            } else {
                self.sign = self.theta.signum();
            }
            self.theta = self.theta.abs();
            let out = self.split_step(dt);
            self.theta *= self.sign;
            return out;
        }
        let z: f64 = self.noise.sample(StandardNormal);
        let next = step_dynamics(self.theta, dt, z, self.dynamics);
        if next.abs() >= TWO_PI {
            self.sign = next.signum();
            return Advance::Absorbed { time: self.t + dt, at_top: true };
        }
        self.theta = next;
        Advance::Running
    }

    fn next_dt(&self) -> f64 {
        match self.scheme {
            Scheme::Split => self.dt_max,
            Scheme::AdaptiveEuler => {
                let d = distance_to_singular(self.theta);
                if d < EULER_BESSEL_RADIUS {
                    // the Bessel step is exact at any size
                    self.dt_max
                } else {
                    (self.euler_c * d * d).clamp(self.dt_floor, self.dt_max)
                }
            }
        }
    }

    /// Run until absorption or until `t = until` (exactly). Returns the
    /// absorption, if any.
    fn run_until(&mut self, until: f64) -> Option<(f64, bool)> {
        if let Some(top) = self.absorbed_at_start() {
            return Some((self.t, top));
        }
        while self.t < until {
            let dt = self.next_dt();
            let remaining = until - self.t;
            let (dt, last) = if remaining <= dt { (remaining, true) } else { (dt, false) };
            match self.advance(dt) {
                Advance::Absorbed { time, at_top } => {
                    self.finish(time, at_top);
                    return Some((time, at_top));
                }
                Advance::Running => {
                    if last {
                        self.t = until;
                    }
                }
            }
        }
        None
    }

    fn finish(&mut self, time: f64, at_top: bool) {
        self.t = time;
        self.theta = match (self.scheme, at_top) {
            (Scheme::AdaptiveEuler, _) => self.sign * TWO_PI,
            (Scheme::Split, true) => TWO_PI,
            (Scheme::Split, false) => 0.0,
        };
        self.record();
    }

    fn side(&self) -> i8 {
        if self.sign < 0.0 {
            -1
        } else {
            1
        }
    }
}

fn run_exit(cfg: &SimConfig, index: u64, record: bool) -> Result<(Option<ExitSample>, Option<DiffusionPath>, u64), SimError> {
    let mut w = Walker::new(cfg, index, Mode::Exit, record)?;
    let exit = w.run_until(cfg.max_time).map(|(time, _)| ExitSample {
        exit_time: time,
        exit_side: w.side(),
        steps: w.steps,
        seed_index: index,
    });
    if let (Some(p), Some(e)) = (w.path.as_mut(), exit) {
        p.exit = Some(e);
    }
    Ok((exit, w.path.take(), w.steps))
}

/// Exit time from `(−2π, 2π)` of the lifted path for random stream `index`.
pub fn sample_exit_indexed(cfg: &SimConfig, index: u64) -> Result<ExitSample, SimError> {
    match run_exit(cfg, index, false)? {
        (Some(e), _, _) => Ok(e),
        (None, _, steps) => Err(SimError::MaxTimeExceeded { max_time: cfg.max_time, steps }),
    }
}

/// [`sample_exit_indexed`] with the first stream of `cfg.seed`.
pub fn sample_exit(cfg: &SimConfig) -> Result<ExitSample, SimError> {
    sample_exit_indexed(cfg, 0)
}

/// The full trajectory of stream `index`, stopped at exit or `max_time`.
pub fn simulate_path(cfg: &SimConfig, index: u64) -> Result<DiffusionPath, SimError> {
    Ok(run_exit(cfg, index, true)?.1.expect("recording was requested"))
}

/// Run `f` on `workers` threads, or on the global pool when `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        None => f(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("thread pool")
            .install(f),
    }
}

/// Exit samples of one run, in stream order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitBatch {
    pub config: SimConfig,
    pub samples: Vec<ExitSample>,
    pub law: EmpiricalLaw,
}

impl ExitBatch {
    pub fn side_fraction(&self) -> f64 {
        self.samples.iter().filter(|s| s.exit_side > 0).count() as f64 / self.samples.len() as f64
    }
}

/// `n` exit samples from streams `0..n`. Fails if more than
/// [`MAX_CENSORED_FRACTION`] of them hit `max_time`.
pub fn sample_exit_batch(cfg: &SimConfig, n: usize) -> Result<ExitBatch, SimError> {
    sample_exit_batch_with_workers(cfg, n, None)
}

pub fn sample_exit_batch_with_workers(cfg: &SimConfig, n: usize, workers: Option<usize>) -> Result<ExitBatch, SimError> {
    if n == 0 {
        return Err(SimError::InvalidConfig("batch size must be at least 1".into()));
    }
    cfg.validate()?;
    let results: Vec<Result<Option<ExitSample>, SimError>> = with_workers(workers, || {
        (0..n as u64).into_par_iter().map(|i| run_exit(cfg, i, false).map(|r| r.0)).collect()
    });
    let mut samples = Vec::with_capacity(n);
    let mut censored = 0;
    for r in results {
        match r? {
            Some(s) => samples.push(s),
            None => censored += 1,
        }
    }
    if censored as f64 > MAX_CENSORED_FRACTION * n as f64 {
        return Err(SimError::Censored { censored, n, max_time: cfg.max_time });
    }
    let law = EmpiricalLaw::new(samples.iter().map(|s| s.exit_time).collect(), cfg.digest(n))?;
    Ok(ExitBatch { config: *cfg, samples, law })
}

/// Exit times cut off at a horizon: those `≤ horizon` plus the number of
/// paths still running there.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSample {
    pub exited: Vec<f64>,
    pub survivors: usize,
    pub horizon: f64,
}

impl TruncatedSample {
    pub fn n(&self) -> usize {
        self.exited.len() + self.survivors
    }

    /// Number of paths with exit time `> s` (`s ≤ horizon`).
    pub fn count_above(&self, s: f64) -> usize {
        self.survivors + self.exited.iter().filter(|&&t| t > s).count()
    }
}

/// `n` exit times truncated at `horizon`; paths are abandoned there, which is
/// what makes far-tail survival estimates affordable.
pub fn sample_truncated(cfg: &SimConfig, n: usize, horizon: f64, workers: Option<usize>) -> Result<TruncatedSample, SimError> {
    if n == 0 {
        return Err(SimError::InvalidConfig("batch size must be at least 1".into()));
    }
    let cfg = cfg.with_max_time(horizon);
    cfg.validate()?;
    let results: Vec<Result<Option<ExitSample>, SimError>> = with_workers(workers, || {
        (0..n as u64).into_par_iter().map(|i| run_exit(&cfg, i, false).map(|r| r.0)).collect()
    });
    let mut exited = Vec::with_capacity(n);
    let mut survivors = 0;
    for r in results {
        match r? {
            Some(s) => exited.push(s.exit_time),
            None => survivors += 1,
        }
    }
    Ok(TruncatedSample { exited, survivors, horizon })
}

/// First point of `2πℤ` hit from `cfg.theta0`, for stream `index`.
pub fn sample_first_hit(cfg: &SimConfig, index: u64) -> Result<FirstHit, SimError> {
    let mut w = Walker::new(cfg, index, Mode::FirstHit, false)?;
    match w.run_until(cfg.max_time) {
        Some((time, at_top)) => Ok(FirstHit {
            time,
            theta: w.base + if at_top { TWO_PI } else { 0.0 },
            steps: w.steps,
        }),
        None => Err(SimError::MaxTimeExceeded { max_time: cfg.max_time, steps: w.steps }),
    }
}

pub fn sample_first_hit_batch(cfg: &SimConfig, n: usize, workers: Option<usize>) -> Result<Vec<FirstHit>, SimError> {
    with_workers(workers, || (0..n as u64).into_par_iter().map(|i| sample_first_hit(cfg, i)).collect())
}

/// Monte Carlo mean of a complex functional with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointEstimate {
    pub t: f64,
    pub mean: Complex64,
    pub std_error: f64,
}

/// Estimates of `E[e^{λ t̄} M^e(θ_{t̄})]`, `t̄ = min(t, T)`, with `T` the exit
/// time from `(−2π, 2π)`, at each checkpoint. Paths start at `cfg.theta0`.
pub fn path_functional_martingale(
    cfg: &SimConfig,
    lambda: Complex64,
    checkpoints: &[f64],
    n: usize,
    workers: Option<usize>,
) -> Result<Vec<CheckpointEstimate>, SimError> {
    if lambda.re > 0.0 {
        return Err(SimError::PositiveLambda(lambda.re));
    }
    if n == 0 {
        return Err(SimError::InvalidConfig("batch size must be at least 1".into()));
    }
    if checkpoints.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(SimError::InvalidConfig("checkpoints must be finite and nonnegative".into()));
    }
    let mut order: Vec<usize> = (0..checkpoints.len()).collect();
    order.sort_by(|&a, &b| checkpoints[a].total_cmp(&checkpoints[b]));
    let params = MartingaleParams::new(cfg.kappa, lambda, crate::martingales::Parity::Even);
    let boundary = params.eval(TWO_PI)?;

    let per_path = |i: u64| -> Result<Vec<Complex64>, SimError> {
        let mut w = Walker::new(cfg, i, Mode::Exit, false)?;
        let mut values = vec![Complex64::new(0.0, 0.0); checkpoints.len()];
        let mut stopped: Option<f64> = None;
        for &j in &order {
            let t = checkpoints[j];
            if stopped.is_none() {
                stopped = w.run_until(t).map(|(time, _)| time);
            }
            values[j] = match stopped {
                Some(time) => (lambda * time).exp() * boundary,
                None => (lambda * t).exp() * params.eval(w.folded())?,
            };
        }
        Ok(values)
    };
    let rows: Vec<Result<Vec<Complex64>, SimError>> =
        with_workers(workers, || (0..n as u64).into_par_iter().map(per_path).collect());
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;

    let nf = n as f64;
    Ok(checkpoints
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let mean = rows.iter().fold(Complex64::new(0.0, 0.0), |acc, r| acc + r[j]) / nf;
            let ss: f64 = rows.iter().map(|r| (r[j] - mean).norm_sqr()).sum();
            let std_error = if n > 1 { (ss / (nf - 1.0) / nf).sqrt() } else { 0.0 };
            CheckpointEstimate { t, mean, std_error }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: f64) -> Kappa {
        Kappa::new(v).unwrap()
    }

    #[test]
    fn fold_values() {
        assert!((lift_fold(-PI) - PI).abs() < 1e-15);
        assert!((lift_fold(5.0 * PI) - PI).abs() < 1e-15);
        assert_eq!(lift_fold(4.0 * PI), 0.0);
        assert!((lift_fold(TWO_PI) - TWO_PI).abs() < 1e-15);
        assert!((lift_fold(-3.0 * PI) - PI).abs() < 1e-15);
    }

    #[test]
    fn euler_step_cases() {
        for th in [0.3, 1.0, 4.0] {
            assert_eq!(step(th, 0.01, 0.7, k(4.0)), th + 2.0 * 0.1 * 0.7);
        }
        assert!((step(PI, 0.01, 0.0, k(6.0)) - PI).abs() < 1e-15);
        // repelling from 2πk for κ > 4, attracting for κ < 4
        for base in [0.0, TWO_PI, -2.0 * TWO_PI] {
            let th = base + 0.01;
            assert!(step(th, 1e-6, 0.0, k(6.0)) > th);
            assert!(step(th, 1e-6, 0.0, k(3.0)) < th);
        }
        // the cap stops a coarse step from jumping over the level
        let th = 0.01;
        assert!(step(th, 1.0, 0.0, k(3.0)) >= 0.5 * th);
    }

    #[test]
    fn remainder_series_matches_direct_form() {
        for x in [0.01, 0.03, 0.0499] {
            assert!((cot_remainder(x) - (cot_half(x) - 2.0 / x)).abs() < 1e-13);
        }
        assert_eq!(cot_remainder(0.0), 0.0);
    }

    #[test]
    fn starting_on_the_boundary_exits_at_once() {
        let cfg = SimConfig::new(k(6.0)).with_theta0(TWO_PI);
        let e = sample_exit(&cfg).unwrap();
        assert_eq!(e.exit_time, 0.0);
        assert_eq!(e.exit_side, 1);
        let e = sample_exit(&cfg.with_theta0(-TWO_PI)).unwrap();
        assert_eq!(e.exit_side, -1);
    }

    #[test]
    fn config_validation() {
        let c = SimConfig::new(k(6.0));
        assert!(c.validate().is_ok());
        assert!(c.with_dt_max(0.0).validate().is_err());
        assert!(c.with_dt_max(0.5).validate().is_err());
        assert!(c.with_dt_floor(1.0).validate().is_err());
        assert!(c.with_max_time(f64::INFINITY).validate().is_err());
        assert!(sample_exit(&c.with_theta0(7.0)).is_err());
        assert!(sample_exit_batch(&c, 0).is_err());
        assert!(c.with_one_arm(3.0).is_err());
    }

    #[test]
    fn batch_of_one_is_first_stream() {
        let c = SimConfig::new(k(5.0)).with_seed(99);
        let b = sample_exit_batch(&c, 1).unwrap();
        assert_eq!(b.samples[0], sample_exit(&c).unwrap());
    }

    #[test]
    fn batches_are_deterministic() {
        let c = SimConfig::new(k(3.5)).with_seed(5);
        let a = sample_exit_batch(&c, 50).unwrap();
        let b = sample_exit_batch(&c, 50).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.law.provenance(), b.law.provenance());
        let other = sample_exit_batch(&c.with_seed(6), 50).unwrap();
        assert_ne!(a.samples, other.samples);
    }

    #[test]
    fn censoring_is_reported() {
        let c = SimConfig::new(k(6.0)).with_max_time(0.5);
        assert!(matches!(sample_exit(&c), Err(SimError::MaxTimeExceeded { .. })));
        assert!(matches!(sample_exit_batch(&c, 20), Err(SimError::Censored { .. })));
        let tr = sample_truncated(&c, 20, 0.5, None).unwrap();
        assert_eq!(tr.n(), 20);
        assert!(tr.survivors > 0);
    }

    #[test]
    fn recorded_path_is_consistent() {
        let c = SimConfig::new(k(3.0)).with_seed(2);
        let p = simulate_path(&c, 0).unwrap();
        let e = p.exit.unwrap();
        assert_eq!(e, sample_exit(&c).unwrap());
        assert_eq!(*p.times.last().unwrap(), e.exit_time);
        assert_eq!(p.thetas.last().unwrap().abs(), TWO_PI);
        assert!(p.times.windows(2).all(|w| w[1] > w[0]));
        assert!(p.thetas.iter().all(|t| t.abs() <= TWO_PI));
        assert!(!p.coin_flips.is_empty());
        assert_eq!(*p.coin_flips.last().unwrap(), e.exit_side);
        // the occupation density near 0 is ∝ x^(d−1), d = 1/3 here, so the
        // fraction within δ of the endpoints scales like δ^(1/3)
        assert!(p.boundary_fraction(1e-12) < 1e-3);
        for kv in [4.0, 6.0] {
            let p = simulate_path(&SimConfig::new(k(kv)).with_seed(2), 0).unwrap();
            // the start at 0 and the exit at 2π are on the boundary by construction
            let n = p.thetas.len() as f64;
            let inner = p.boundary_fraction(1e-6) * n - 2.0;
            assert!(inner < 1e-3 * n, "kappa={kv}: {inner} of {n}");
        }
    }

    #[test]
    fn first_hit_lands_on_the_lattice() {
        let c = SimConfig::new(k(6.0)).with_theta0(TWO_PI + 1.0);
        for i in 0..20 {
            let h = sample_first_hit(&c, i).unwrap();
            assert!(h.theta == TWO_PI || h.theta == 2.0 * TWO_PI, "{}", h.theta);
            assert!(h.time > 0.0);
        }
        let h = sample_first_hit(&c.with_theta0(0.0), 0).unwrap();
        assert_eq!((h.time, h.theta), (0.0, 0.0));
    }

    #[test]
    fn zero_lambda_functional_is_exactly_one() {
        let c = SimConfig::new(k(6.0));
        let est = path_functional_martingale(&c, Complex64::new(0.0, 0.0), &[0.5, 2.0], 50, None).unwrap();
        for e in est {
            assert_eq!(e.mean, Complex64::new(1.0, 0.0));
            assert_eq!(e.std_error, 0.0);
        }
        assert!(path_functional_martingale(&c, Complex64::new(0.1, 0.0), &[1.0], 5, None).is_err());
    }

    #[test]
    fn one_arm_mapping() {
        let (kk, speed) = one_arm_equivalent(6.0).unwrap();
        assert!((kk.value() - 6.0).abs() < 1e-15 && (speed - 1.0).abs() < 1e-15);
        let (kk, speed) = one_arm_equivalent(10.0).unwrap();
        assert!((kk.value() - 5.0).abs() < 1e-15 && (speed - 0.5).abs() < 1e-15);
        let d = Dynamics::one_arm(10.0).unwrap();
        // same Bessel dimension as the main diffusion it maps to
        assert!((d.bessel_dimension() - kk.bessel_dimension()).abs() < 1e-15);
    }
}
