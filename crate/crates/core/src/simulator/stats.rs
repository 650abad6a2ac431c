//! Small statistics toolkit for the Monte Carlo checks.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::Result;

/// Sample mean and 95% Student-t half-width (`None` with fewer than two
/// samples).
pub fn mean_ci95(values: &[f64]) -> (f64, Option<f64>) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, None);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (m - 1) as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975);
    (mean, Some(t * (var / m as f64).sqrt()))
}

/// One-sample Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic Kolmogorov p-value with the Stephens small-sample correction.
pub fn ks_pvalue(n: usize, d: f64) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Empirical distribution of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Self {
        samples.sort_by(f64::total_cmp);
        Self { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `<= y`.
    pub fn cdf(&self, y: f64) -> f64 {
        if self.sorted.is_empty() {
            return f64::NAN;
        }
        self.sorted.partition_point(|&s| s <= y) as f64 / self.sorted.len() as f64
    }

    /// Positive sample quantiles at `points` evenly spaced probabilities,
    /// a log-spaced grid that follows the mass of the distribution.
    pub fn quantile_grid(&self, points: usize) -> Vec<f64> {
        let n = self.sorted.len();
        let mut grid: Vec<f64> = (1..points)
            .map(|k| self.sorted[(k * n / points).min(n - 1)])
            .filter(|&y| y > 0.0)
            .collect();
        grid.dedup();
        grid
    }

    /// Largest gap between this ECDF and `model` over `grid`, checking both
    /// one-sided limits at each point.
    pub fn sup_distance<F: Fn(f64) -> Result<f64>>(&self, grid: &[f64], model: F) -> Result<f64> {
        let n = self.sorted.len() as f64;
        let mut worst: f64 = 0.0;
        for &y in grid {
            let f = model(y)?;
            let right = self.cdf(y);
            let left = self.sorted.partition_point(|&s| s < y) as f64 / n;
            worst = worst.max((f - right).abs()).max((f - left).abs());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ci_examples() {
        let (m, ci) = mean_ci95(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        // t_{0.975,2} = 4.302653
        assert!((ci.unwrap() - 4.302_652_729_7 / 3f64.sqrt()).abs() < 1e-6);
        assert_eq!(mean_ci95(&[1.0]).1, None);
    }

    #[test]
    fn ks_accepts_uniform_rejects_shifted() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..5000).map(|_| rng.random()).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0));
        assert!(ks_pvalue(xs.len(), d) > 0.01);
        let d = ks_statistic(&xs, |x| (x - 0.05).clamp(0.0, 1.0));
        assert!(ks_pvalue(xs.len(), d) < 1e-6);
    }

    #[test]
    fn kolmogorov_reference_value() {
        // Q_KS(1.0) = 0.26999967
        let n = 1_000_000;
        let d = 1.0 / ((n as f64).sqrt() + 0.12 + 0.11 / (n as f64).sqrt());
        assert!((ks_pvalue(n, d) - 0.269_999_67).abs() < 1e-6);
    }

    #[test]
    fn ecdf_basics() {
        let e = EmpiricalCdf::new(vec![3.0, 1.0, 2.0, 2.0]);
        assert_eq!(e.cdf(0.5), 0.0);
        assert_eq!(e.cdf(2.0), 0.75);
        assert_eq!(e.cdf(9.0), 1.0);
        let d = e.sup_distance(&[2.0], |_| Ok(0.5)).unwrap();
        assert!((d - 0.25).abs() < 1e-15);
    }
}
