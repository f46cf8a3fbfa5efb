//! Goodness-of-fit report for a batch of exit samples against the closed-form
//! law.

use serde::Serialize;

use crate::lawlib::{self, LawError};
use crate::stats::{self, EmpiricalLaw};
use crate::Kappa;

/// Survivors kept at the top of the tail window.
const TAIL_MIN_SURVIVORS: usize = 200;
/// Relative size of the first neglected spectral term at the start of the
/// tail window.
const TAIL_SUBLEADING: f64 = 1e-2;
/// Tolerated relative error of the fitted tail rate.
pub const TAIL_RELATIVE_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct KsGate {
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanGate {
    pub sample_mean: f64,
    pub std_error: f64,
    pub mean_b: f64,
    /// `(sample_mean − mean_b) / std_error`.
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailGate {
    /// Maximum-likelihood exponential rate of the excesses over `window[0]`.
    pub rate: f64,
    pub std_error: f64,
    pub alpha: f64,
    pub window: [f64; 2],
    pub exceedances: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub kappa: f64,
    pub n: usize,
    pub ks: KsGate,
    pub mean: MeanGate,
    /// Absent when the sample is too small to reach the tail.
    pub tail: Option<TailGate>,
    pub pass: bool,
}

/// Start of the window where `Pr[B > s]` is a single exponential up to a
/// relative error [`TAIL_SUBLEADING`].
pub fn tail_window_start(kappa: Kappa) -> f64 {
    // second to first spectral term: 3 exp(−κ s / 4) times the ratio of rates
    let k = kappa.value();
    let r0 = k / 32.0 - lawlib::reweight_rate(kappa);
    let r1 = 9.0 * k / 32.0 - lawlib::reweight_rate(kappa);
    (3.0 * r0 / r1 / TAIL_SUBLEADING).ln().max(0.0) / (k / 4.0)
}

fn tail_gate(kappa: Kappa, law: &EmpiricalLaw) -> Option<TailGate> {
    let n = law.n();
    if n < 10 * TAIL_MIN_SURVIVORS {
        return None;
    }
    let lo = tail_window_start(kappa);
    let hi = law.quantile(1.0 - TAIL_MIN_SURVIVORS as f64 / n as f64);
    if hi <= lo {
        return None;
    }
    // exponential excesses over lo, censored at hi
    let mut exposure = 0.0;
    let mut events = 0usize;
    for &x in law.samples().iter().filter(|&&x| x > lo) {
        exposure += x.min(hi) - lo;
        if x <= hi {
            events += 1;
        }
    }
    if events == 0 {
        return None;
    }
    let rate = events as f64 / exposure;
    let std_error = rate / (events as f64).sqrt();
    let alpha = lawlib::gasket_exponents(kappa).alpha;
    Some(TailGate {
        rate,
        std_error,
        alpha,
        window: [lo, hi],
        exceedances: law.count_above(lo),
        pass: (rate / alpha - 1.0).abs() < TAIL_RELATIVE_TOLERANCE,
    })
}

/// KS, mean and tail gates of `law` against the exit law at `kappa`.
pub fn verify_law(kappa: Kappa, law: &EmpiricalLaw) -> Result<VerifyReport, LawError> {
    let cdf_err = std::cell::RefCell::new(None);
    let statistic = stats::ks_statistic(law, |x| {
        if x <= 0.0 {
            return 0.0;
        }
        lawlib::cdf_b(kappa, x).unwrap_or_else(|e| {
            cdf_err.borrow_mut().get_or_insert(e);
            f64::NAN
        })
    });
    if let Some(e) = cdf_err.into_inner() {
        return Err(e);
    }
    let threshold = stats::ks_critical_value(law.n());
    let ks = KsGate { statistic, threshold, pass: statistic < threshold };

    let mean_b = lawlib::mean_b(kappa);
    let std_error = law.std_error();
    let z = (law.mean() - mean_b) / std_error;
    let mean = MeanGate { sample_mean: law.mean(), std_error, mean_b, z, pass: z.abs() <= 3.0 };

    let tail = tail_gate(kappa, law);
    let pass = ks.pass && mean.pass && tail.as_ref().is_none_or(|t| t.pass);
    Ok(VerifyReport { kappa: kappa.value(), n: law.n(), ks, mean, tail, pass })
}
