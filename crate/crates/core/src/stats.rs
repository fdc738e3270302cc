//! Deterministic reductions and Monte-Carlo error bars.

use serde::{Deserialize, Serialize};

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn new(value: f64, stderr: f64) -> Self {
        Estimate { value, stderr }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, stderr: 0.0 }
    }

    /// `sqrt(se_a² + se_b²)`.
    pub fn combined_se(&self, other: &Estimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }

    /// `|a - b| <= z * combined SE`.
    pub fn agrees_with(&self, other: &Estimate, z: f64) -> bool {
        (self.value - other.value).abs() <= z * self.combined_se(other)
    }
}

impl std::fmt::Display for Estimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.6e} ± {:.2e}", self.value, self.stderr)
    }
}

/// Pairwise (cascade) summation; the order is fixed by the slice layout.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        s
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// Sample mean with the standard error `s / sqrt(n)` for independent draws.
pub fn mean_se(xs: &[f64]) -> Estimate {
    let n = xs.len();
    let m = mean(xs);
    if n < 2 {
        return Estimate::new(m, f64::NAN);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    Estimate::new(m, (var / n as f64).sqrt())
}

/// Mean of a correlated series with a batch-means standard error.
pub fn batch_means(xs: &[f64], batches: usize) -> Estimate {
    let n = xs.len();
    let b = batches.max(2).min(n.max(2));
    let len = n / b;
    if len == 0 {
        return mean_se(xs);
    }
    let means: Vec<f64> = (0..b).map(|i| mean(&xs[i * len..(i + 1) * len])).collect();
    let e = mean_se(&means);
    Estimate::new(mean(xs), e.stderr)
}

/// Self-normalized weighted mean `Σ w_i f_i` (weights summing to one) with
/// the delta-method error `sqrt(Σ w_i² (f_i - μ)²)`.
pub fn weighted_mean_se(weights: &[f64], values: &[f64]) -> Estimate {
    assert_eq!(weights.len(), values.len());
    let terms: Vec<f64> = weights.iter().zip(values).map(|(w, f)| w * f).collect();
    let mu = pairwise_sum(&terms);
    let sq: Vec<f64> = weights
        .iter()
        .zip(values)
        .map(|(w, f)| (w * (f - mu)).powi(2))
        .collect();
    Estimate::new(mu, pairwise_sum(&sq).sqrt())
}

/// Stable `log Σ exp(x_i)`; `-∞` entries are ignored.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let terms: Vec<f64> = xs.iter().map(|x| (x - m).exp()).collect();
    m + pairwise_sum(&terms).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..10_000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 49_995_000.0);
    }

    #[test]
    fn mean_se_basic() {
        let e = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.value, 2.5);
        assert!((e.stderr - (5.0_f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn weighted_uniform_reduces_to_plain() {
        let v = [1.0, 5.0, 2.0, 8.0];
        let w = [0.25; 4];
        let e = weighted_mean_se(&w, &v);
        assert_eq!(e.value, 4.0);
    }

    #[test]
    fn lse() {
        assert!((log_sum_exp(&[0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, 1.0]), 1.0);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }
}
