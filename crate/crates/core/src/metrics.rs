//! Distances between the Gaussian and Gibbs measures.
//!
//! A [`ProductGaussianSpec`] lists the variances `E|û(n)|²` of independent
//! complex modes `n = 1..M`. Each complex mode is a pair of real Gaussians
//! with variance `a_n / 2`, so Hellinger affinities enter squared and the
//! Kullback-Leibler divergence of mode `n` is `φ(a_n/b_n)` with
//! `φ(t) = t - 1 - log t`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dispersion::{k_delta, l_delta, q_delta, DepthParam};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::gibbs::WeightedEnsemble;
use crate::scalar::{phi_excess, Scalar};
use crate::stats::{mean, mean_se, pairwise_sum, Estimate};

/// Independent mean-zero complex Gaussian modes with variances `a_1..a_M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductGaussianSpec<T> {
    variances: Vec<T>,
    family: String,
}

impl<T: Scalar> ProductGaussianSpec<T> {
    pub fn new(variances: Vec<T>, family: impl Into<String>) -> Result<Self> {
        if let Some(v) = variances.iter().find(|v| !(**v > T::zero() && v.is_finite())) {
            return Err(Error::Domain(format!("variances must be positive and finite, got {v:?}")));
        }
        Ok(ProductGaussianSpec { variances, family: family.into() })
    }

    /// Variances `2π / S(n)` from symbol values `S(1..M)`.
    pub fn from_symbols(symbols: &[T], family: impl Into<String>) -> Result<Self> {
        let two_pi = T::PI() + T::PI();
        Self::new(symbols.iter().map(|&s| two_pi / s).collect(), family)
    }

    /// `μ_δ` (or `μ_∞`) on modes `1..M`.
    pub fn deep(depth: DepthParam<T>, modes: usize) -> Result<Self> {
        let s: Vec<T> = (1..=modes as i64).map(|n| k_delta(depth, n)).collect::<Result<_>>()?;
        Self::from_symbols(&s, format!("mu_deep({depth})"))
    }

    /// `μ̃_δ` (or `μ̃_0` for the shallow limit) on modes `1..M`.
    pub fn scaled(depth: DepthParam<T>, modes: usize) -> Result<Self> {
        let s: Vec<T> = (1..=modes as i64).map(|n| l_delta(depth, n)).collect::<Result<_>>()?;
        Self::from_symbols(&s, format!("mu_scaled({depth})"))
    }

    pub fn len(&self) -> usize {
        self.variances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variances.is_empty()
    }

    pub fn variances(&self) -> &[T] {
        &self.variances
    }

    pub fn family(&self) -> &str {
        &self.family
    }
}

fn same_len<T>(a: &ProductGaussianSpec<T>, b: &ProductGaussianSpec<T>) -> Result<()> {
    if a.variances.len() != b.variances.len() {
        return Err(Error::Domain(format!(
            "mode counts differ: {} vs {}",
            a.variances.len(),
            b.variances.len()
        )));
    }
    Ok(())
}

/// Hellinger affinity `√2 (ab)^{1/4} / √(a+b)` of two real centred Gaussians.
pub fn hellinger_mode_factor<T: Scalar>(a: T, b: T) -> T {
    log_affinity_real(a, b).exp()
}

// -(1/2) log(1 + (√r - 1)² / (2√r)) with r = a/b
fn log_affinity_real<T: Scalar>(a: T, b: T) -> T {
    let sr = (a / b).sqrt();
    let d = sr - T::one();
    -T::lit(0.5) * (d * d / (sr + sr)).ln1p()
}

fn log_affinity<T: Scalar>(a: &ProductGaussianSpec<T>, b: &ProductGaussianSpec<T>) -> Result<T> {
    same_len(a, b)?;
    let mut acc = T::zero();
    for (&x, &y) in a.variances.iter().zip(&b.variances) {
        acc = acc + log_affinity_real(x, y) + log_affinity_real(x, y);
    }
    Ok(acc)
}

/// Hellinger affinity `H(μ, ν) = ∫ sqrt(dμ dν)` of two product measures.
///
/// Underflows to 0 once the log-affinity leaves the float range.
pub fn hellinger_product<T: Scalar>(a: &ProductGaussianSpec<T>, b: &ProductGaussianSpec<T>) -> Result<T> {
    Ok(log_affinity(a, b)?.exp())
}

/// `d_H = sqrt(1 - H)`.
pub fn hellinger_distance<T: Scalar>(a: &ProductGaussianSpec<T>, b: &ProductGaussianSpec<T>) -> Result<T> {
    let l = log_affinity(a, b)?;
    Ok((-l.exp_m1()).max(T::zero()).sqrt())
}

/// Truncated divergence and a bound on the omitted modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlReport<T> {
    pub value: T,
    /// Upper bound on `Σ_{n>M} φ(n / K_δ(n))`.
    pub tail_bound: T,
    pub modes: usize,
}

/// `d_KL(μ_δ, μ_∞) ≈ Σ_{n=1}^{M} φ(n / K_δ(n))`.
///
/// The tail uses `φ(t) ≤ (t-1)²`, `n - K_δ(n) ≤ 1/δ` and `K_δ(n) ≥ n - 1/δ`,
/// which give `Σ_{n>M} ≤ δ⁻² / (M - 1/δ)` when `M > 1/δ`.
pub fn kl_deep<T: Scalar>(delta: T, modes: usize) -> Result<KlReport<T>> {
    if modes == 0 {
        return Err(Error::Domain("kl_deep needs at least one mode".into()));
    }
    let depth = DepthParam::Finite(delta);
    depth.finite_value("kl_deep")?;
    let mut terms = Vec::with_capacity(modes);
    for n in (1..=modes as i64).rev() {
        let q = q_delta(depth, n)?;
        let k = k_delta(depth, n)?;
        terms.push(phi_excess(q / k));
    }
    let mut value = T::zero();
    for t in terms {
        value = value + t;
    }
    let c = T::one() / delta;
    let m = T::of_int(modes as i64);
    let tail_bound = if m > c { c * c / (m - c) } else { T::infinity() };
    Ok(KlReport { value, tail_bound, modes })
}

/// Hellinger distance against the Pinsker-type bound `sqrt(KL/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinskerReport<T> {
    pub hellinger: T,
    pub bound: T,
    pub ordered: bool,
}

/// Compares `d_H(μ_δ, μ_∞)` with `sqrt(d_KL / 2)` on modes `1..M`.
pub fn pinsker_check<T: Scalar>(delta: T, modes: usize) -> Result<PinskerReport<T>> {
    let a = ProductGaussianSpec::deep(DepthParam::Finite(delta), modes)?;
    let b = ProductGaussianSpec::deep(DepthParam::Infinite, modes)?;
    let hellinger = hellinger_distance(&a, &b)?;
    let bound = (kl_deep(delta, modes)?.value / T::lit(2.0)).sqrt();
    Ok(PinskerReport { hellinger, bound, ordered: hellinger <= bound })
}

/// `S_m = Σ_{n≤m} (a_n/b_n - 1)²` for `m = 1..M`.
pub fn kakutani_partial_sums<T: Scalar>(a: &ProductGaussianSpec<T>, b: &ProductGaussianSpec<T>) -> Result<Vec<T>> {
    same_len(a, b)?;
    let mut acc = T::zero();
    Ok(a.variances
        .iter()
        .zip(&b.variances)
        .map(|(&x, &y)| {
            let d = x / y - T::one();
            acc = acc + d * d;
            acc
        })
        .collect())
}

/// `S_M`; requires both specs to have at least `M` modes.
pub fn kakutani_sum<T: Scalar>(a: &ProductGaussianSpec<T>, b: &ProductGaussianSpec<T>, modes: usize) -> Result<T> {
    if modes > a.len() || modes > b.len() {
        return Err(Error::Domain(format!("requested {modes} modes, specs have {} and {}", a.len(), b.len())));
    }
    let mut acc = T::zero();
    for (&x, &y) in a.variances[..modes].iter().zip(&b.variances[..modes]) {
        let d = x / y - T::one();
        acc = acc + d * d;
    }
    Ok(acc)
}

/// `log dμ_δ/dμ_∞` restricted to the modes of `field`:
/// `Σ_n log(K_δ(n)/n) + (n - K_δ(n)) |û(n)|² / 2π`.
pub fn log_rn_deep(depth: DepthParam<f64>, field: &SpectralField) -> Result<f64> {
    depth.finite_value("log_rn_deep")?;
    let mut terms = Vec::with_capacity(field.cutoff());
    for (i, c) in field.coeffs().iter().enumerate() {
        let n = (i + 1) as i64;
        let q = q_delta(depth, n)?;
        terms.push((-q / n as f64).ln_1p() + q * c.norm_sqr() / (2.0 * PI));
    }
    Ok(pairwise_sum(&terms))
}

const JACKKNIFE_GROUPS: usize = 20;

fn scaled_weights(log_w: &[f64]) -> Result<Vec<f64>> {
    let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::DegenerateEnsemble("normalizer is zero".into()));
    }
    Ok(log_w.iter().map(|l| (l - max).exp()).collect())
}

fn tv_core(f: &[f64], g: &[f64]) -> f64 {
    let zf = mean(f);
    let zg = mean(g);
    let d: Vec<f64> = f.iter().zip(g).map(|(a, b)| (a / zf - b / zg).abs()).collect();
    0.5 * mean(&d)
}

/// Scheffé estimate `½ E_μ|f/Z_f - g/Z_g|` of `d_TV(ρ_f, ρ_g)` from log densities
/// of the same base sample, with a grouped jackknife standard error.
pub fn scheffe_tv(log_f: &[f64], log_g: &[f64]) -> Result<Estimate> {
    if log_f.len() != log_g.len() {
        return Err(Error::Unpaired(format!("{} vs {} densities", log_f.len(), log_g.len())));
    }
    let n = log_f.len();
    if n < 2 * JACKKNIFE_GROUPS {
        return Err(Error::Domain(format!("Scheffé estimate needs at least {} samples", 2 * JACKKNIFE_GROUPS)));
    }
    let f = scaled_weights(log_f)?;
    let g = scaled_weights(log_g)?;
    let full = tv_core(&f, &g);
    let size = n / JACKKNIFE_GROUPS;
    let mut reps = Vec::with_capacity(JACKKNIFE_GROUPS);
    let mut fk = Vec::with_capacity(n);
    let mut gk = Vec::with_capacity(n);
    for j in 0..JACKKNIFE_GROUPS {
        let (lo, hi) = (j * size, if j + 1 == JACKKNIFE_GROUPS { n } else { (j + 1) * size });
        fk.clear();
        gk.clear();
        fk.extend(f[..lo].iter().chain(&f[hi..]));
        gk.extend(g[..lo].iter().chain(&g[hi..]));
        reps.push(tv_core(&fk, &gk));
    }
    let rbar = mean(&reps);
    let dev: Vec<f64> = reps.iter().map(|r| (r - rbar).powi(2)).collect();
    let g_ = JACKKNIFE_GROUPS as f64;
    let se = ((g_ - 1.0) / g_ * pairwise_sum(&dev)).sqrt();
    Ok(Estimate::new(full, se))
}

/// Ky-Fan distance `E[1 ∧ ‖X - Y‖_{H^s}]` over coupled pairs.
pub fn ky_fan(xs: &[SpectralField], ys: &[SpectralField], s: f64) -> Result<Estimate> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::Unpaired(format!("{} vs {} samples", xs.len(), ys.len())));
    }
    let d: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| x.sub(y).sobolev_norm(s).min(1.0)).collect();
    Ok(mean_se(&d))
}

fn marginal_points(e: &WeightedEnsemble, modes: &[usize]) -> Result<Vec<Vec<f64>>> {
    e.fields
        .iter()
        .map(|f| {
            let mut p = Vec::with_capacity(2 * modes.len());
            for &m in modes {
                if m == 0 || m > f.cutoff() {
                    return Err(Error::Domain(format!("mode {m} outside 1..={}", f.cutoff())));
                }
                let c = f.coeffs()[m - 1];
                p.push(c.re);
                p.push(c.im);
            }
            Ok(p)
        })
        .collect()
}

fn mean_abs_diff(wa: &[f64], pa: &[Vec<f64>], wb: &[f64], pb: &[Vec<f64>]) -> f64 {
    let mut rows = Vec::with_capacity(pa.len());
    for (w, x) in wa.iter().zip(pa) {
        let mut acc = 0.0;
        for (v, y) in wb.iter().zip(pb) {
            let d2: f64 = x.iter().zip(y).map(|(s, t)| (s - t) * (s - t)).sum();
            acc += v * d2.sqrt();
        }
        rows.push(w * acc);
    }
    pairwise_sum(&rows)
}

/// Energy distance between the joint laws of the Fourier coefficients at
/// `modes` under two weighted ensembles (real and imaginary parts as coordinates).
pub fn weak_marginal_distance(a: &WeightedEnsemble, b: &WeightedEnsemble, modes: &[usize]) -> Result<f64> {
    if modes.is_empty() || modes.len() > 4 {
        return Err(Error::Domain(format!("between 1 and 4 modes supported, got {}", modes.len())));
    }
    let pa = marginal_points(a, modes)?;
    let pb = marginal_points(b, modes)?;
    let ab = mean_abs_diff(&a.weights, &pa, &b.weights, &pb);
    let aa = mean_abs_diff(&a.weights, &pa, &a.weights, &pa);
    let bb = mean_abs_diff(&b.weights, &pb, &b.weights, &pb);
    Ok((2.0 * ab - aa - bb).max(0.0).sqrt())
}

/// One row of a distance report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub pair: String,
    pub metric: String,
    pub value: f64,
    pub stderr: f64,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
}
