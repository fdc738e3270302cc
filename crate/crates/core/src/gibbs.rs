//! Wick powers, renormalized potentials and truncated Gibbs measures.
//!
//! For a field `u` with cutoff `N` and Wick variance `σ`, the potential is
//! `R(u) = (1/(k+1)) ∫ H_{k+1}(P_N u; σ) dx`. Integrals are computed on a
//! physical grid of `M ≥ (k+1)N + 1` points (rounded up to a power of two),
//! where the trapezoid rule is exact for the polynomial nonlinearity.
//!
//! Densities are handled in log form:
//!
//! * defocusing (`k` odd): `-R(u)`
//! * cutoff cubic: `log χ_K(∫W(u²)) - (1/3)∫u³`
//! * tamed cubic: `-(1/3)∫u³ - A (∫W(u²))²`

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldKind, GaussianSource, SeededRng, SpectralField, SpectralGrid};
use crate::hermite::{hermite_unchecked, WickProvenance, HERMITE_DEGREE_CAP};
use crate::stats::{batch_means, mean_se, pairwise_sum, weighted_mean_se, Estimate};
use crate::WickVar;

/// Smallest power of two `M ≥ (k+1)N + 1`.
pub fn dealias_size(k: usize, cutoff: usize) -> usize {
    ((k + 1) * cutoff + 1).next_power_of_two()
}

/// Degree, cutoff, Wick variance and base measure of a truncated model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WickContext {
    pub k: usize,
    pub cutoff: usize,
    pub sigma: WickVar,
    pub kind: FieldKind,
}

impl WickContext {
    /// Context with the Wick variance of `kind` at cutoff `N`.
    pub fn new(k: usize, cutoff: usize, kind: FieldKind) -> Result<Self> {
        kind.validate()?;
        let sigma = kind.wick_variance(cutoff)?;
        Self::with_sigma(k, cutoff, kind, sigma)
    }

    /// Context with an explicit variance, e.g. `σ_KdV` instead of `σ_{KdV,N}`.
    pub fn with_sigma(k: usize, cutoff: usize, kind: FieldKind, sigma: WickVar) -> Result<Self> {
        if k == 0 || k + 1 > HERMITE_DEGREE_CAP {
            return Err(Error::DegreeLimit { degree: k + 1, cap: HERMITE_DEGREE_CAP });
        }
        if cutoff == 0 {
            return Err(Error::Domain("cutoff N must be at least 1".into()));
        }
        let matches = match (sigma.provenance, kind) {
            (WickProvenance::Deep { depth, cutoff: c }, FieldKind::DeepGauss(d)) => depth == d && c == cutoff,
            (WickProvenance::Shallow { depth, cutoff: c }, FieldKind::ScaledGauss(d)) => depth == d && c == cutoff,
            (WickProvenance::KdVTruncated { cutoff: c }, FieldKind::KdVGauss) => c == cutoff,
            (WickProvenance::KdVLimit, FieldKind::KdVGauss) => true,
            _ => false,
        };
        if !matches {
            return Err(Error::InvalidFamily(format!(
                "Wick variance {:?} does not belong to {kind} at N={cutoff}",
                sigma.provenance
            )));
        }
        Ok(WickContext { k, cutoff, sigma, kind })
    }

    pub fn grid_size(&self) -> usize {
        dealias_size(self.k, self.cutoff)
    }

    /// Same model at another cutoff, with its own Wick variance.
    pub fn at_cutoff(&self, cutoff: usize) -> Result<Self> {
        Self::new(self.k, cutoff, self.kind)
    }
}

/// Weight applied to the base Gaussian measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DensitySpec {
    /// `G ≡ 1`: the base Gaussian itself.
    Unit,
    /// `exp(-R(u))`, odd `k`.
    Defocusing,
    /// `χ_K(∫W(u²)) exp(-(1/3)∫u³)`, `k = 2`.
    CutoffCubic { k_cut: f64 },
    /// `exp(-(1/3)∫u³ - A(∫W(u²))²)`, `k = 2`.
    TamedCubic { a: f64 },
}

impl DensitySpec {
    pub fn check(&self, ctx: &WickContext) -> Result<()> {
        match *self {
            DensitySpec::Unit => Ok(()),
            DensitySpec::Defocusing if ctx.k % 2 == 1 => Ok(()),
            DensitySpec::Defocusing => {
                Err(Error::InvalidFamily(format!("defocusing density needs odd k, got k={}", ctx.k)))
            }
            DensitySpec::CutoffCubic { k_cut: p } | DensitySpec::TamedCubic { a: p } => {
                if ctx.k != 2 {
                    return Err(Error::InvalidFamily(format!("cubic densities need k=2, got k={}", ctx.k)));
                }
                if !(p > 0.0 && p.is_finite()) {
                    return Err(Error::Domain(format!("density parameter must be positive, got {p}")));
                }
                Ok(())
            }
        }
    }
}

impl std::fmt::Display for DensitySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DensitySpec::Unit => write!(f, "unit"),
            DensitySpec::Defocusing => write!(f, "defocusing"),
            DensitySpec::CutoffCubic { k_cut } => write!(f, "cutoff(K={k_cut})"),
            DensitySpec::TamedCubic { a } => write!(f, "tamed(A={a})"),
        }
    }
}

/// Ramp equal to 1 for `|x| ≤ K`, linear down to 0 at `|x| = 2K`.
pub fn chi_cutoff(x: f64, k_cut: f64) -> f64 {
    let ax = x.abs();
    if ax <= k_cut {
        1.0
    } else if ax >= 2.0 * k_cut {
        0.0
    } else {
        (2.0 * k_cut - ax) / k_cut
    }
}

/// `C_{A,K} = exp(4AK²)`, so that `G^K ≤ C_{A,K} 𝒢^K` pointwise.
pub fn tamed_constant(a: f64, k_cut: f64) -> f64 {
    (4.0 * a * k_cut * k_cut).exp()
}

/// Reusable grid state for evaluating Wick functionals of one field at a time.
pub struct WickEvaluator {
    ctx: WickContext,
    grid: SpectralGrid,
    low: Vec<Complex64>,
    values: Vec<f64>,
    work: Vec<f64>,
}

impl WickEvaluator {
    pub fn new(ctx: WickContext) -> Self {
        let m = ctx.grid_size();
        WickEvaluator {
            ctx,
            grid: SpectralGrid::new(m),
            low: vec![Complex64::new(0.0, 0.0); ctx.cutoff],
            values: vec![0.0; m],
            work: vec![0.0; m],
        }
    }

    /// Evaluator on an explicit grid; fails when `M < (k+1)N + 1`.
    pub fn with_grid(ctx: WickContext, m: usize) -> Result<Self> {
        let required = (ctx.k + 1) * ctx.cutoff + 1;
        if m < required {
            return Err(Error::Aliasing { grid: m, required });
        }
        Ok(WickEvaluator {
            ctx,
            grid: SpectralGrid::new(m),
            low: vec![Complex64::new(0.0, 0.0); ctx.cutoff],
            values: vec![0.0; m],
            work: vec![0.0; m],
        })
    }

    pub fn context(&self) -> &WickContext {
        &self.ctx
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    /// Places `P_N u` on the grid; shorter fields are zero padded.
    pub fn load(&mut self, field: &SpectralField) -> Result<()> {
        self.load_coeffs(field.coeffs())
    }

    pub fn load_coeffs(&mut self, coeffs: &[Complex64]) -> Result<()> {
        let n = self.ctx.cutoff.min(coeffs.len());
        self.low[..n].copy_from_slice(&coeffs[..n]);
        self.low[n..].iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        self.grid.synthesize(&self.low, &mut self.values)
    }

    /// Grid values of the loaded `u_N`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn quadrature(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for &v in &self.values {
            acc += f(v);
        }
        acc * 2.0 * PI / self.values.len() as f64
    }

    /// `∫ H_d(u_N; σ) dx`.
    pub fn wick_integral(&self, degree: usize) -> f64 {
        let s = self.ctx.sigma.sigma;
        self.quadrature(|v| hermite_unchecked(degree, v, s))
    }

    /// `∫ u_N^p dx`.
    pub fn moment_integral(&self, p: i32) -> f64 {
        self.quadrature(|v| v.powi(p))
    }

    /// `∫ W(u_N²) dx = ∫ u_N² dx - 2πσ`.
    pub fn wick_mass(&self) -> f64 {
        self.wick_integral(2)
    }

    /// `R(u) = (1/(k+1)) ∫ H_{k+1}(u_N; σ) dx`.
    pub fn potential(&self) -> f64 {
        self.wick_integral(self.ctx.k + 1) / (self.ctx.k + 1) as f64
    }

    /// Log density of the loaded field; `-∞` outside the cutoff support.
    pub fn log_density(&self, spec: &DensitySpec) -> f64 {
        match *spec {
            DensitySpec::Unit => 0.0,
            DensitySpec::Defocusing => -self.potential(),
            DensitySpec::CutoffCubic { k_cut } => {
                let chi = chi_cutoff(self.wick_mass(), k_cut);
                if chi == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    chi.ln() - self.moment_integral(3) / 3.0
                }
            }
            DensitySpec::TamedCubic { a } => {
                let m = self.wick_mass();
                -self.moment_integral(3) / 3.0 - a * m * m
            }
        }
    }

    /// Fourier coefficients `1..=out.len()` of `H_d(u_N; σ)`.
    pub fn wick_power_modes(&mut self, degree: usize, out: &mut [Complex64]) -> Result<()> {
        let m = self.values.len();
        let required = degree * self.ctx.cutoff + out.len() + 1;
        if m < required {
            return Err(Error::Aliasing { grid: m, required });
        }
        let s = self.ctx.sigma.sigma;
        for (w, &v) in self.work.iter_mut().zip(&self.values) {
            *w = hermite_unchecked(degree, v, s);
        }
        self.grid.analyze(&self.work, out)
    }

    /// `P_N H_k(u_N; σ)` in Fourier, written to `out[0..N]`.
    pub fn wick_power_into(&mut self, out: &mut [Complex64]) -> Result<()> {
        let k = self.ctx.k;
        let n = self.ctx.cutoff;
        self.wick_power_modes(k, &mut out[..n])
    }
}

/// `P_N H_k(P_N u; σ)`.
pub fn wick_power(field: &SpectralField, ctx: &WickContext) -> Result<SpectralField> {
    let mut ev = WickEvaluator::new(*ctx);
    ev.load(field)?;
    let mut out = vec![Complex64::new(0.0, 0.0); ctx.cutoff];
    ev.wick_power_into(&mut out)?;
    Ok(SpectralField::new(out))
}

/// `P_N H_k(P_N u; σ)` computed on a grid of `m` points.
pub fn wick_power_on_grid(field: &SpectralField, ctx: &WickContext, m: usize) -> Result<SpectralField> {
    let mut ev = WickEvaluator::with_grid(*ctx, m)?;
    ev.load(field)?;
    let mut out = vec![Complex64::new(0.0, 0.0); ctx.cutoff];
    ev.wick_power_into(&mut out)?;
    Ok(SpectralField::new(out))
}

/// `R(u) = (1/(k+1)) ∫ W((P_N u)^{k+1}) dx`.
pub fn potential_r(field: &SpectralField, ctx: &WickContext) -> Result<f64> {
    let mut ev = WickEvaluator::new(*ctx);
    ev.load(field)?;
    Ok(ev.potential())
}

pub fn log_density(field: &SpectralField, ctx: &WickContext, spec: &DensitySpec) -> Result<f64> {
    spec.check(ctx)?;
    let mut ev = WickEvaluator::new(*ctx);
    ev.load(field)?;
    Ok(ev.log_density(spec))
}

pub fn density(field: &SpectralField, ctx: &WickContext, spec: &DensitySpec) -> Result<f64> {
    log_density(field, ctx, spec).map(f64::exp)
}

/// `γ_N(z) = E[X_N(x) X_N(x+z)] = (1/π) Σ_{n=1}^{N} cos(nz) / S(n)`.
pub fn field_covariance(kind: FieldKind, cutoff: usize, z: f64) -> Result<f64> {
    let mut terms = Vec::with_capacity(cutoff);
    for n in 1..=cutoff as i64 {
        terms.push((n as f64 * z).cos() / kind.symbol(n)?);
    }
    Ok(pairwise_sum(&terms) / PI)
}

/// `k! (2π)^{2-k}`: the constant in `E|ℱ(H_k(X_N; σ))(n)|² = k!(2π)^{2-k} Σ_{n_1+…+n_k=n} Π 1/S(n_j)`.
pub fn chaos_prefactor(k: usize) -> f64 {
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    fact * (2.0 * PI).powi(2 - k as i32)
}

/// Exact `E|ℱ(H_k(X_N; σ_N))(n)|²` by direct convolution over `0 < |n_j| ≤ N`.
pub fn chaos_second_moment(ctx: &WickContext, n: i64) -> Result<f64> {
    let (k, cutoff) = (ctx.k, ctx.cutoff);
    if k > 3 || cutoff > 32 {
        return Err(Error::SizeLimit(format!("direct convolution supports k ≤ 3 and N ≤ 32, got k={k}, N={cutoff}")));
    }
    let big = cutoff as i64;
    let inv: Vec<f64> = (-big..=big)
        .map(|m| if m == 0 { Ok(0.0) } else { ctx.kind.symbol(m).map(|s| 1.0 / s) })
        .collect::<Result<_>>()?;
    let weight = |m: i64| -> f64 {
        if m == 0 || m.abs() > big {
            0.0
        } else {
            inv[(m + big) as usize]
        }
    };
    let mut terms = Vec::new();
    match k {
        1 => terms.push(weight(n)),
        2 => {
            for a in -big..=big {
                terms.push(weight(a) * weight(n - a));
            }
        }
        _ => {
            for a in -big..=big {
                for b in -big..=big {
                    terms.push(weight(a) * weight(b) * weight(n - a - b));
                }
            }
        }
    }
    Ok(chaos_prefactor(k) * pairwise_sum(&terms))
}

/// Monte-Carlo `E|ℱ(H_k(X_N; σ))(n)|²` for `1 ≤ n ≤ N`.
pub fn chaos_second_moment_mc(ctx: &WickContext, n: usize, samples: usize, rng: &SeededRng) -> Result<Estimate> {
    if n == 0 || n > ctx.cutoff {
        return Err(Error::Domain(format!("frequency must lie in 1..={}", ctx.cutoff)));
    }
    let mut ev = WickEvaluator::new(*ctx);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut sq = Vec::with_capacity(samples);
    for i in 0..samples as u64 {
        let g = rng.member(i).draw(ctx.cutoff);
        ev.load(&SpectralField::from_gaussians(ctx.kind, &g)?)?;
        ev.wick_power_modes(ctx.k, &mut out)?;
        sq.push(out[n - 1].norm_sqr());
    }
    Ok(mean_se(&sq))
}

/// How an ensemble was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SamplerInfo {
    /// Self-normalized importance sampling from the base Gaussian.
    Snis { z: Estimate, log_z: f64 },
    /// Metropolis-Hastings chain with a base-preserving Crank-Nicolson proposal.
    Mh { acceptance: f64, step: f64, burn_in: usize, thin: usize },
}

/// Weighted sample from a truncated Gibbs measure.
#[derive(Debug, Clone)]
pub struct WeightedEnsemble {
    pub ctx: WickContext,
    pub spec: DensitySpec,
    pub seed: u64,
    pub fields: Vec<SpectralField>,
    /// Normalized weights.
    pub weights: Vec<f64>,
    /// Unnormalized log densities of the members.
    pub log_densities: Vec<f64>,
    /// `1 / Σ w_i²`.
    pub ess: f64,
    pub sampler: SamplerInfo,
}

impl WeightedEnsemble {
    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Expectation of an observable with its standard error.
    pub fn expect(&self, f: impl Fn(&SpectralField) -> f64) -> Estimate {
        let values: Vec<f64> = self.fields.iter().map(f).collect();
        self.expect_values(&values)
    }

    /// Expectation of precomputed per-member values.
    pub fn expect_values(&self, values: &[f64]) -> Estimate {
        match self.sampler {
            SamplerInfo::Snis { .. } => weighted_mean_se(&self.weights, values),
            SamplerInfo::Mh { .. } => batch_means(values, 50),
        }
    }

    /// CSV with columns `sample_id,weight,<observables>`.
    pub fn write_csv<W: Write>(&self, mut w: W, observables: &[(&str, &dyn Fn(&SpectralField) -> f64)]) -> Result<()> {
        write!(w, "sample_id,weight")?;
        for (name, _) in observables {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for (i, (field, wt)) in self.fields.iter().zip(&self.weights).enumerate() {
            write!(w, "{i},{wt:e}")?;
            for (_, f) in observables {
                write!(w, ",{:e}", f(field))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn manifest(&self) -> EnsembleManifest {
        EnsembleManifest {
            ctx: self.ctx,
            spec: self.spec,
            seed: self.seed,
            count: self.len(),
            ess: self.ess,
            sampler: self.sampler,
        }
    }
}

/// JSON companion of an ensemble CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleManifest {
    pub ctx: WickContext,
    pub spec: DensitySpec,
    pub seed: u64,
    pub count: usize,
    pub ess: f64,
    pub sampler: SamplerInfo,
}

impl EnsembleManifest {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Log densities of `fields` under `(ctx, spec)`.
pub fn log_densities(fields: &[SpectralField], ctx: &WickContext, spec: &DensitySpec) -> Result<Vec<f64>> {
    spec.check(ctx)?;
    let mut ev = WickEvaluator::new(*ctx);
    fields
        .iter()
        .map(|f| {
            ev.load(f)?;
            Ok(ev.log_density(spec))
        })
        .collect()
}

/// `count` independent base-Gaussian draws at cutoff `N`; member `i` uses `rng.member(i)`.
pub fn base_ensemble(kind: FieldKind, cutoff: usize, count: usize, rng: &SeededRng) -> Result<Vec<SpectralField>> {
    (0..count as u64)
        .map(|i| SpectralField::from_gaussians(kind, &rng.member(i).draw(cutoff)))
        .collect()
}

/// Normalized weights and ESS from log densities.
pub fn normalize_log_weights(log_w: &[f64]) -> Result<(Vec<f64>, f64)> {
    let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::DegenerateEnsemble("every sample has zero weight".into()));
    }
    let raw: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let total = pairwise_sum(&raw);
    let weights: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let sq: Vec<f64> = weights.iter().map(|w| w * w).collect();
    Ok((weights, 1.0 / pairwise_sum(&sq)))
}

/// Self-normalized importance sample of `ρ ∝ G dμ` from base-Gaussian draws.
pub fn snis_sample(ctx: &WickContext, spec: &DensitySpec, count: usize, rng: &SeededRng) -> Result<WeightedEnsemble> {
    if count < 10 {
        return Err(Error::Domain(format!("importance sampling needs at least 10 draws, got {count}")));
    }
    spec.check(ctx)?;
    let fields = base_ensemble(ctx.kind, ctx.cutoff, count, rng)?;
    let log_w = log_densities(&fields, ctx, spec)?;
    let (weights, ess) = normalize_log_weights(&log_w)?;
    if ess < 0.01 * count as f64 {
        log::warn!("importance sampling degenerate: ESS {ess:.1} of {count} draws ({spec})");
    }
    let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let zs = mean_se(&scaled);
    let scale = max.exp();
    let z = Estimate::new(zs.value * scale, zs.stderr * scale);
    let log_z = max + zs.value.ln();
    Ok(WeightedEnsemble {
        ctx: *ctx,
        spec: *spec,
        seed: rng.seed,
        fields,
        weights,
        log_densities: log_w,
        ess,
        sampler: SamplerInfo::Snis { z, log_z },
    })
}

/// Chain settings for [`mh_sample`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhOptions {
    pub count: usize,
    /// `β` in the proposal `sqrt(1-β²) u + β ξ`, `0 < β ≤ 1`.
    pub step: f64,
    pub burn_in: usize,
    pub thin: usize,
}

impl MhOptions {
    pub const DEFAULT_STEP: f64 = 0.3;

    pub fn new(count: usize, step: f64) -> Self {
        MhOptions { count, step, burn_in: count / 10, thin: 1 }
    }
}

/// Metropolis-Hastings sample of `ρ ∝ G dμ`.
///
/// The proposal `sqrt(1-β²) u + β ξ` with `ξ` a fresh base draw leaves the
/// base Gaussian invariant, so the acceptance ratio is `G(u')/G(u)`.
pub fn mh_sample(ctx: &WickContext, spec: &DensitySpec, opts: &MhOptions, rng: &SeededRng) -> Result<WeightedEnsemble> {
    if !(opts.step > 0.0 && opts.step <= 1.0) {
        return Err(Error::Domain(format!("step scale must lie in (0, 1], got {}", opts.step)));
    }
    if opts.count == 0 || opts.thin == 0 {
        return Err(Error::Domain("count and thin must be positive".into()));
    }
    spec.check(ctx)?;
    let n = ctx.cutoff;
    let mut chain = rng.sequential();
    let inv_sqrt: Vec<f64> = ctx.kind.symbols(n)?.iter().map(|s| 1.0 / s.sqrt()).collect();
    let sqrt_pi = PI.sqrt();
    let draw = |out: &mut [Complex64], chain: &mut rand_chacha::ChaCha8Rng| {
        for (o, f) in out.iter_mut().zip(&inv_sqrt) {
            let re: f64 = chain.sample(StandardNormal);
            let im: f64 = chain.sample(StandardNormal);
            *o = Complex64::new(re, im) * (sqrt_pi * f);
        }
    };
    let mut ev = WickEvaluator::new(*ctx);
    let mut cur = vec![Complex64::new(0.0, 0.0); n];
    let mut cur_ld = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        draw(&mut cur, &mut chain);
        ev.load_coeffs(&cur)?;
        cur_ld = ev.log_density(spec);
        if cur_ld.is_finite() {
            break;
        }
    }
    if !cur_ld.is_finite() {
        return Err(Error::DegenerateEnsemble("no starting point with positive density".into()));
    }
    let keep = (1.0 - opts.step * opts.step).sqrt();
    let mut prop = vec![Complex64::new(0.0, 0.0); n];
    let mut xi = vec![Complex64::new(0.0, 0.0); n];
    let mut fields = Vec::with_capacity(opts.count);
    let mut lds = Vec::with_capacity(opts.count);
    let mut accepted = 0usize;
    let total = opts.burn_in + opts.count * opts.thin;
    for step in 0..total {
        draw(&mut xi, &mut chain);
        for ((p, c), x) in prop.iter_mut().zip(&cur).zip(&xi) {
            *p = c * keep + x * opts.step;
        }
        ev.load_coeffs(&prop)?;
        let ld = ev.log_density(spec);
        let u: f64 = chain.random();
        if ld.is_finite() && u.ln() < ld - cur_ld {
            std::mem::swap(&mut cur, &mut prop);
            cur_ld = ld;
            accepted += 1;
        }
        if step >= opts.burn_in && (step - opts.burn_in) % opts.thin == opts.thin - 1 {
            fields.push(SpectralField::new(cur.clone()));
            lds.push(cur_ld);
        }
    }
    let count = fields.len();
    Ok(WeightedEnsemble {
        ctx: *ctx,
        spec: *spec,
        seed: rng.seed,
        fields,
        weights: vec![1.0 / count as f64; count],
        log_densities: lds,
        ess: count as f64,
        sampler: SamplerInfo::Mh {
            acceptance: accepted as f64 / total as f64,
            step: opts.step,
            burn_in: opts.burn_in,
            thin: opts.thin,
        },
    })
}
