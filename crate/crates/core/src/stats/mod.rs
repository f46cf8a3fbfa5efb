//! Empirical laws, Kolmogorov–Smirnov distances, numerical Laplace
//! transforms and least-squares slopes.

pub mod quad;

use std::ops::RangeInclusive;

use num_complex::Complex64;
use thiserror::Error;

use quad::QuadError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("an empirical law needs at least one sample")]
    Empty,
    #[error("sample {index} is not finite ({value})")]
    NonFiniteSample { index: usize, value: f64 },
    #[error("slope fit needs at least 3 points in the window, found {0}")]
    InsufficientPoints(usize),
    #[error("all abscissae in the fit window coincide")]
    DegenerateAbscissae,
}

/// Sorted i.i.d. samples with a digest of the configuration that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalLaw {
    samples: Vec<f64>,
    provenance: String,
}

impl EmpiricalLaw {
    pub fn new(mut samples: Vec<f64>, provenance: impl Into<String>) -> Result<Self, StatsError> {
        if samples.is_empty() {
            return Err(StatsError::Empty);
        }
        if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(StatsError::NonFiniteSample { index, value });
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { samples, provenance: provenance.into() })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.n() as f64
    }

    /// Unbiased sample variance (0 for a single sample).
    pub fn variance(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        self.samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
    }

    /// Monte Carlo standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance() / self.n() as f64).sqrt()
    }

    /// Right-continuous empirical CDF.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.n() as f64
    }

    /// Number of samples strictly greater than `x`.
    pub fn count_above(&self, x: f64) -> usize {
        self.n() - self.samples.partition_point(|&s| s <= x)
    }

    /// Fraction of samples above `x` with its binomial standard error.
    pub fn survival(&self, x: f64) -> (f64, f64) {
        let n = self.n() as f64;
        let p = self.count_above(x) as f64 / n;
        (p, (p * (1.0 - p) / n).sqrt())
    }

    /// Lower empirical quantile.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.n();
        let i = ((q.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n);
        self.samples[i - 1]
    }
}

/// `sup_x |F_n(x) − F(x)|`, evaluated at the sample points from both sides.
pub fn ks_statistic<F: Fn(f64) -> f64>(law: &EmpiricalLaw, cdf: F) -> f64 {
    let n = law.n() as f64;
    law.samples().iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d.max(above).max(below)
    })
}

/// Asymptotic 0.1% critical value of the one-sample KS statistic.
pub fn ks_critical_value(n: usize) -> f64 {
    1.95 / (n as f64).sqrt()
}

/// `∫₀^∞ e^{λx} density(x) dx`, split at `domain_split` with the tail
/// integrated over doubling panels.
pub fn laplace_quadrature<F: Fn(f64) -> f64>(
    density: F,
    lambda: Complex64,
    domain_split: f64,
) -> Result<Complex64, QuadError> {
    const TOL: f64 = 1e-9;
    let g = |x: f64| {
        if x <= 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            (lambda * x).exp() * density(x)
        }
    };
    let head = quad::integrate(g, 0.0, domain_split, TOL * 0.1, 1e-13)?;
    let tail = quad::integrate_to_infinity(g, domain_split, domain_split.max(1.0), TOL)?;
    Ok(head.value + tail.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub std_error: f64,
    pub points: usize,
}

/// Ordinary least squares on the points whose abscissa lies in `window`.
pub fn slope_fit(points: &[(f64, f64)], window: RangeInclusive<f64>) -> Result<SlopeFit, StatsError> {
    let pts: Vec<(f64, f64)> = points.iter().copied().filter(|(x, _)| window.contains(x)).collect();
    let n = pts.len();
    if n < 3 {
        return Err(StatsError::InsufficientPoints(n));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(StatsError::DegenerateAbscissae);
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let std_error = (rss / (nf - 2.0) / sxx).sqrt();
    Ok(SlopeFit { slope, intercept, std_error, points: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lawlib;
    use crate::Kappa;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn law(v: Vec<f64>) -> EmpiricalLaw {
        EmpiricalLaw::new(v, "test").unwrap()
    }

    #[test]
    fn midpoint_quantiles() {
        let n = 1000;
        let l = law((0..n).map(|i| (i as f64 + 0.5) / n as f64).collect());
        assert!((ks_statistic(&l, |x| x) - 0.5 / n as f64).abs() < 1e-15);
    }

    #[test]
    fn against_own_ecdf() {
        let l = law(vec![0.3, 1.2, 0.1, 2.5, 0.9]);
        let copy = l.clone();
        assert!((ks_statistic(&l, |x| copy.ecdf(x)) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn uniform_sample_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let l = law((0..n).map(|_| rng.random::<f64>()).collect());
        assert!(ks_statistic(&l, |x| x.clamp(0.0, 1.0)) < ks_critical_value(n));
    }

    #[test]
    fn rejects_bad_samples() {
        assert_eq!(EmpiricalLaw::new(vec![], ""), Err(StatsError::Empty));
        assert!(matches!(EmpiricalLaw::new(vec![1.0, f64::NAN], ""), Err(StatsError::NonFiniteSample { index: 1, .. })));
    }

    #[test]
    fn moments_and_quantiles() {
        let l = law(vec![4.0, 1.0, 3.0, 2.0]);
        assert_eq!(l.samples(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(l.mean(), 2.5);
        assert!((l.variance() - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(l.quantile(0.5), 2.0);
        assert_eq!(l.count_above(2.0), 2);
        assert_eq!(l.survival(10.0).0, 0.0);
    }

    #[test]
    fn exponential_laplace() {
        let v = laplace_quadrature(|x| (-x).exp(), Complex64::new(-1.0, 0.0), 5.0).unwrap();
        assert!((v.re - 0.5).abs() < 1e-10);
    }

    #[test]
    fn laplace_of_density_b() {
        let k = Kappa::new(6.0).unwrap();
        let d = |x: f64| lawlib::density_b(k, x).unwrap().re();
        let one = laplace_quadrature(d, Complex64::new(0.0, 0.0), 10.0).unwrap();
        assert!((one.re - 1.0).abs() < 1e-8);
        let half = laplace_quadrature(d, Complex64::new(-1.0 / 12.0, 0.0), 10.0).unwrap();
        assert!((half.re - 0.5).abs() < 1e-6);
        let doubled = laplace_quadrature(d, Complex64::new(-1.0 / 12.0, 0.0), 20.0).unwrap();
        assert!((half - doubled).norm() < 1e-8);
    }

    #[test]
    fn exact_line() {
        let pts: Vec<_> = (0..10).map(|i| (i as f64, 3.0 * i as f64 + 1.0)).collect();
        let f = slope_fit(&pts, 0.0..=9.0).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        assert!(f.std_error < 1e-12);
        assert_eq!(slope_fit(&pts, 0.0..=1.0), Err(StatsError::InsufficientPoints(2)));
    }

    proptest! {
        #[test]
        fn ks_invariant_under_monotone_map(seed in 0u64..1000, n in 5usize..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.01).collect();
            let cdf = |x: f64| (x - 0.01).clamp(0.0, 1.0);
            let a = ks_statistic(&law(xs.clone()), cdf);
            let b = ks_statistic(&law(xs.iter().map(|x| x * x * x).collect()), |y: f64| cdf(y.cbrt()));
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn affine_fit_is_exact(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let pts: Vec<_> = (0..7).map(|i| { let x = 0.3 * i as f64; (x, a * x + b) }).collect();
            let f = slope_fit(&pts, 0.0..=2.0).unwrap();
            prop_assert!((f.slope - a).abs() < 1e-12);
        }
    }
}
