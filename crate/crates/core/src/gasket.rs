//! Nested conformal radii around a point and the gasket exponent.
//!
//! The log-conformal-radius decrements `B_1, B_2, …` of the nested loops
//! surrounding a point are i.i.d. with the exit law of the diffusion, so a
//! nested sequence is a partial-sum walk of exit times. The chance that the
//! first loop comes within `ε` of the point decays like `ε^α`, and covering
//! the annulus at distance `~ j ε` around every point of a grid costs
//! `Σ_{j ≤ 1/ε} (1/ε) j^{−α} ≍ ε^{α−2}` balls in expectation. A matching
//! lower bound comes from packing `Θ(1/ε²)` points in the disk, each in the
//! gasket with probability `≍ ε^α`; only the upper sum is computed here.

use thiserror::Error;

use crate::diffusion::{self, SimConfig, SimError};
use crate::lawlib::{self, LawError};
use crate::stats::{slope_fit, SlopeFit, StatsError};
use crate::Kappa;

/// Survival estimates built on fewer exits than this are flagged.
pub const MIN_SURVIVORS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GasketError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Law(#[from] LawError),
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("s must be positive, got {0}")]
    NonPositiveS(f64),
    #[error("epsilon must lie in (0, 1/2), got {0}")]
    InvalidEpsilon(f64),
}

/// Log conformal radii `log CR(A_k)` of the first `depth` nested loops,
/// starting from `log CR(𝔻, 0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedRadiiSequence {
    pub kappa: Kappa,
    pub log_cr: Vec<f64>,
    pub increments: Vec<f64>,
}

impl NestedRadiiSequence {
    fn from_increments(kappa: Kappa, increments: Vec<f64>) -> Self {
        let mut log_cr = Vec::with_capacity(increments.len() + 1);
        log_cr.push(0.0);
        for b in &increments {
            log_cr.push(log_cr.last().unwrap() - b);
        }
        Self { kappa, log_cr, increments }
    }

    pub fn depth(&self) -> usize {
        self.increments.len()
    }
}

/// `count` independent sequences of `depth` loops. Sequence `j` uses the
/// exit samples of streams `j·depth .. (j+1)·depth` of `cfg.seed`, started at
/// `θ_0 = 0`.
pub fn sample_nested_many(
    cfg: &SimConfig,
    depth: usize,
    count: usize,
    workers: Option<usize>,
) -> Result<Vec<NestedRadiiSequence>, GasketError> {
    if depth == 0 {
        return Err(GasketError::ZeroDepth);
    }
    let cfg = cfg.with_theta0(0.0);
    let batch = diffusion::sample_exit_batch_with_workers(&cfg, depth * count, workers)?;
    Ok(batch
        .samples
        .chunks(depth)
        .map(|c| NestedRadiiSequence::from_increments(cfg.kappa, c.iter().map(|s| s.exit_time).collect()))
        .collect())
}

pub fn sample_nested(cfg: &SimConfig, depth: usize) -> Result<NestedRadiiSequence, GasketError> {
    Ok(sample_nested_many(cfg, depth, 1, None)?.remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalPoint {
    pub s: f64,
    /// Fraction of paths with `B > s`.
    pub estimate: f64,
    /// Binomial standard error.
    pub std_error: f64,
    pub survivors: usize,
    /// `Pr[B > s]` from the closed form.
    pub closed_form: f64,
    /// Fewer than [`MIN_SURVIVORS`] paths survived.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    pub n: usize,
    pub points: Vec<SurvivalPoint>,
    /// Slope of `log estimate` against `s` over the non-degenerate points,
    /// when there are at least three.
    pub fit: Option<SlopeFit>,
}

/// Monte Carlo estimates of `Pr[B > s]` on a grid from `n` paths, each
/// abandoned at the largest `s`.
pub fn survival_curve(cfg: &SimConfig, s_grid: &[f64], n: usize, workers: Option<usize>) -> Result<SurvivalCurve, GasketError> {
    if let Some(&bad) = s_grid.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(GasketError::NonPositiveS(bad));
    }
    let horizon = s_grid.iter().copied().fold(0.0, f64::max);
    let cfg = cfg.with_theta0(0.0);
    let tr = diffusion::sample_truncated(&cfg, n, horizon, workers)?;
    let nf = n as f64;
    let mut points = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let survivors = tr.count_above(s);
        let p = survivors as f64 / nf;
        points.push(SurvivalPoint {
            s,
            estimate: p,
            std_error: (p * (1.0 - p) / nf).sqrt(),
            survivors,
            closed_form: lawlib::survival_b(cfg.kappa, s)?,
            degenerate: survivors < MIN_SURVIVORS,
        });
    }
    let usable: Vec<(f64, f64)> = points.iter().filter(|p| !p.degenerate).map(|p| (p.s, p.estimate.ln())).collect();
    let fit = if usable.len() >= 3 { Some(slope_fit(&usable, f64::NEG_INFINITY..=f64::INFINITY)?) } else { None };
    Ok(SurvivalCurve { n, points, fit })
}

pub fn survival_probability(cfg: &SimConfig, s: f64, n: usize) -> Result<SurvivalPoint, GasketError> {
    Ok(survival_curve(cfg, &[s], n, None)?.points[0])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverEstimate {
    pub epsilon: f64,
    pub expected_disk_count: f64,
    /// Slope of `log count` against `log ε` over the decade below `ε`.
    pub exponent_fit: f64,
}

/// `Σ_{j=1}^{⌈1/ε⌉} (1/ε) j^{−α}` with unit constants.
pub fn covering_count(kappa: Kappa, epsilon: f64) -> Result<f64, GasketError> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(GasketError::InvalidEpsilon(epsilon));
    }
    let alpha = lawlib::gasket_exponents(kappa).alpha;
    let m = (1.0 / epsilon).ceil() as u64;
    // sum the small terms first
    let sum: f64 = (1..=m).rev().map(|j| (j as f64).powf(-alpha)).sum();
    Ok(sum / epsilon)
}

pub fn covering_sum(kappa: Kappa, epsilon: f64) -> Result<CoverEstimate, GasketError> {
    let count = covering_count(kappa, epsilon)?;
    let pts = (0..=4)
        .map(|i| {
            let e = epsilon * 10f64.powf(-0.25 * i as f64);
            Ok((e.ln(), covering_count(kappa, e)?.ln()))
        })
        .collect::<Result<Vec<_>, GasketError>>()?;
    let fit = slope_fit(&pts, f64::NEG_INFINITY..=f64::INFINITY)?;
    Ok(CoverEstimate { epsilon, expected_disk_count: count, exponent_fit: fit.slope })
}

/// Fit of `log covering_count` against `log ε` over the given scales.
pub fn covering_exponent(kappa: Kappa, epsilons: &[f64]) -> Result<SlopeFit, GasketError> {
    let pts = epsilons
        .iter()
        .map(|&e| Ok((e.ln(), covering_count(kappa, e)?.ln())))
        .collect::<Result<Vec<_>, GasketError>>()?;
    Ok(slope_fit(&pts, f64::NEG_INFINITY..=f64::INFINITY)?)
}
