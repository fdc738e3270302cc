//! Frequency-truncated dynamics of the generalized ILW family.
//!
//! In Fourier variables the truncated equation reads
//!
//! ```text
//! ∂_t û(n) = i ω(n) û(n) + i n ℱ[P_N H_k(P_N u; σ)](n)   for 0 < |n| ≤ N,
//! ∂_t û(n) = i ω(n) û(n)                                 for |n| > N,
//! ```
//!
//! with `ω(n) = n S(n)`: `S = K_δ` (gILW), `|n|` (gBO), `L_δ` (scaled gILW),
//! `n²` (gKdV). This follows from `G_δ ∂_x` having the symbol `K_δ(n)`.
//!
//! Low modes are integrated with fourth-order Runge-Kutta in the interaction
//! picture `v = e^{-iωt} û`, so the linear part is exact; high modes are rotated
//! by their exact phase. The conserved energy is
//! `E(u) = (1/2π) Σ_{n=1}^{N} S(n) |û(n)|² + R(u)` with `R` the Wick potential.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::DepthParam;
use crate::error::{Error, Result};
use crate::field::{Depth, FieldKind, GaussianSource, SeededRng, SpectralField};
use crate::gibbs::{snis_sample, DensitySpec, WeightedEnsemble, WickContext, WickEvaluator};
use crate::stats::{mean_se, pairwise_sum, weighted_mean_se, Estimate};
use crate::WickVar;

/// Equation family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// gILW at finite depth; gBO for `Infinite`.
    DeepGILW(Depth),
    /// Scaled gILW at finite depth; gKdV for `Shallow`.
    ScaledGILW(Depth),
}

impl Family {
    /// Gaussian base measure whose covariance is `2π / S(n)`.
    pub fn field_kind(&self) -> Result<FieldKind> {
        let kind = match *self {
            Family::DeepGILW(d) => FieldKind::DeepGauss(d),
            Family::ScaledGILW(DepthParam::Shallow) => FieldKind::KdVGauss,
            Family::ScaledGILW(DepthParam::Infinite) => {
                return Err(Error::InvalidFamily("ScaledGILW needs a finite or zero depth".into()))
            }
            Family::ScaledGILW(d) => FieldKind::ScaledGauss(d),
        };
        kind.validate()?;
        Ok(kind)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::DeepGILW(DepthParam::Infinite) => write!(f, "gBO"),
            Family::DeepGILW(d) => write!(f, "gILW(delta={d})"),
            Family::ScaledGILW(DepthParam::Shallow) => write!(f, "gKdV"),
            Family::ScaledGILW(d) => write!(f, "scaled-gILW(delta={d})"),
        }
    }
}

/// Truncated equation: family, degree, cutoff and the frozen Wick variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSpec {
    pub family: Family,
    pub k: usize,
    pub cutoff: usize,
    pub sigma: WickVar,
    /// `false` only for `k = 2`, where the Wick correction is a constant.
    pub renormalized: bool,
    /// Test hook: drop the nonlinearity.
    pub linear_only: bool,
}

impl EvolutionSpec {
    /// Spec with the Wick variance of the family at cutoff `N`.
    pub fn new(family: Family, k: usize, cutoff: usize) -> Result<Self> {
        let sigma = family.field_kind()?.wick_variance(cutoff)?;
        Self::with_sigma(family, k, cutoff, sigma)
    }

    pub fn with_sigma(family: Family, k: usize, cutoff: usize, sigma: WickVar) -> Result<Self> {
        let spec = EvolutionSpec { family, k, cutoff, sigma, renormalized: k != 2, linear_only: false };
        spec.wick_context()?;
        Ok(spec)
    }

    pub fn unrenormalized(mut self) -> Result<Self> {
        if self.k != 2 {
            return Err(Error::InvalidFamily(format!("only k=2 runs may skip renormalization, got k={}", self.k)));
        }
        self.renormalized = false;
        Ok(self)
    }

    pub fn linear(mut self) -> Self {
        self.linear_only = true;
        self
    }

    pub fn wick_context(&self) -> Result<WickContext> {
        WickContext::with_sigma(self.k, self.cutoff, self.family.field_kind()?, self.sigma)
    }

    pub fn symbol(&self, n: i64) -> Result<f64> {
        self.family.field_kind()?.symbol(n)
    }
}

/// `ω(n) = n S(n)`, odd in `n`.
pub fn linear_frequency(family: Family, n: i64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("the zero mode is not part of the state".into()));
    }
    Ok(n as f64 * family.field_kind()?.symbol(n)?)
}

/// `F_N(u)`: `i n ℱ[P_N H_k(P_N u; σ)](n)` for `n = 1..=N`.
pub fn nonlinearity(field: &SpectralField, spec: &EvolutionSpec) -> Result<SpectralField> {
    let mut ev = WickEvaluator::new(spec.wick_context()?);
    ev.load(field)?;
    let mut out = vec![Complex64::new(0.0, 0.0); spec.cutoff];
    ev.wick_power_into(&mut out)?;
    for (i, c) in out.iter_mut().enumerate() {
        *c *= Complex64::new(0.0, (i + 1) as f64);
    }
    Ok(SpectralField::new(out))
}

/// `E(u) = (1/2π) Σ_{n=1}^{N} S(n)|û(n)|² + R(u)`.
pub fn hamiltonian(field: &SpectralField, spec: &EvolutionSpec) -> Result<f64> {
    let mut ev = WickEvaluator::new(spec.wick_context()?);
    let symbols = spec.family.field_kind()?.symbols(spec.cutoff)?;
    energy(&mut ev, &symbols, field.coeffs(), spec.renormalized)
}

fn kinetic(symbols: &[f64], low: &[Complex64]) -> f64 {
    let terms: Vec<f64> = symbols.iter().zip(low).map(|(s, c)| s * c.norm_sqr()).collect();
    pairwise_sum(&terms) / (2.0 * PI)
}

fn energy(ev: &mut WickEvaluator, symbols: &[f64], coeffs: &[Complex64], renormalized: bool) -> Result<f64> {
    let n = symbols.len().min(coeffs.len());
    ev.load_coeffs(coeffs)?;
    let k = ev.context().k;
    let pot = if renormalized {
        ev.potential()
    } else {
        ev.moment_integral(k as i32 + 1) / (k + 1) as f64
    };
    Ok(kinetic(&symbols[..n], &coeffs[..n]) + pot)
}

/// Low-mode L² mass `(1/π) Σ_{n≤N} |û(n)|²`.
fn low_l2(low: &[Complex64]) -> f64 {
    let terms: Vec<f64> = low.iter().map(|c| c.norm_sqr()).collect();
    pairwise_sum(&terms) / PI
}

/// Allocation-free interaction-picture RK4 for the low modes.
pub struct Integrator {
    spec: EvolutionSpec,
    ev: WickEvaluator,
    omega: Vec<f64>,
    symbols: Vec<f64>,
    phase: Vec<Complex64>,
    v: Vec<Complex64>,
    stage: Vec<Complex64>,
    u: Vec<Complex64>,
    wp: Vec<Complex64>,
    k: [Vec<Complex64>; 4],
}

impl Integrator {
    pub fn new(spec: EvolutionSpec) -> Result<Self> {
        let ctx = spec.wick_context()?;
        let n = spec.cutoff;
        let omega = (1..=n as i64).map(|m| linear_frequency(spec.family, m)).collect::<Result<_>>()?;
        let z = vec![Complex64::new(0.0, 0.0); n];
        Ok(Integrator {
            spec,
            ev: WickEvaluator::new(ctx),
            omega,
            symbols: ctx.kind.symbols(n)?,
            phase: z.clone(),
            v: z.clone(),
            stage: z.clone(),
            u: z.clone(),
            wp: z.clone(),
            k: [z.clone(), z.clone(), z.clone(), z],
        })
    }

    pub fn spec(&self) -> &EvolutionSpec {
        &self.spec
    }

    fn set_phase(&mut self, tau: f64) {
        for (p, w) in self.phase.iter_mut().zip(&self.omega) {
            *p = Complex64::from_polar(1.0, w * tau);
        }
    }

    // out = e^{-iωτ} F(e^{iωτ} stage), with `phase` already at τ
    fn rhs(&mut self, slot: usize) -> Result<()> {
        if self.spec.linear_only {
            self.k[slot].iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            return Ok(());
        }
        for ((u, s), p) in self.u.iter_mut().zip(&self.stage).zip(&self.phase) {
            *u = s * p;
        }
        self.ev.load_coeffs(&self.u)?;
        self.ev.wick_power_into(&mut self.wp)?;
        for (i, ((o, w), p)) in self.k[slot].iter_mut().zip(&self.wp).zip(&self.phase).enumerate() {
            *o = Complex64::new(0.0, (i + 1) as f64) * w * p.conj();
        }
        Ok(())
    }

    /// Advances low-mode coefficients `û(1..N)` by `steps` steps of signed size `dt`.
    pub fn advance(&mut self, low: &mut [Complex64], dt: f64, steps: usize) -> Result<()> {
        let n = self.spec.cutoff;
        if low.len() != n {
            return Err(Error::Domain(format!("expected {n} low modes, got {}", low.len())));
        }
        self.v.copy_from_slice(low);
        let half = 0.5 * dt;
        for step in 0..steps {
            let tau = step as f64 * dt;
            self.set_phase(tau);
            self.stage.copy_from_slice(&self.v);
            self.rhs(0)?;
            self.set_phase(tau + half);
            for i in 0..n {
                self.stage[i] = self.v[i] + self.k[0][i] * half;
            }
            self.rhs(1)?;
            for i in 0..n {
                self.stage[i] = self.v[i] + self.k[1][i] * half;
            }
            self.rhs(2)?;
            self.set_phase(tau + dt);
            for i in 0..n {
                self.stage[i] = self.v[i] + self.k[2][i] * dt;
            }
            self.rhs(3)?;
            let c = dt / 6.0;
            for i in 0..n {
                self.v[i] += (self.k[0][i] + (self.k[1][i] + self.k[2][i]) * 2.0 + self.k[3][i]) * c;
            }
        }
        self.set_phase(steps as f64 * dt);
        for ((l, v), p) in low.iter_mut().zip(&self.v).zip(&self.phase) {
            *l = v * p;
        }
        Ok(())
    }

    /// Conserved energy of low-mode coefficients (kinetic part only for linear runs).
    pub fn energy(&mut self, low: &[Complex64]) -> Result<f64> {
        if self.spec.linear_only {
            let n = self.symbols.len().min(low.len());
            return Ok(kinetic(&self.symbols[..n], &low[..n]));
        }
        energy(&mut self.ev, &self.symbols, low, self.spec.renormalized)
    }

    /// `max_x |u_N(x)|` on the dealiased grid.
    pub fn sup_norm(&mut self, low: &[Complex64]) -> Result<f64> {
        self.ev.load_coeffs(low)?;
        Ok(self.ev.values().iter().fold(0.0, |m, v| v.abs().max(m)))
    }

    /// Step size from the policy for initial data `low`.
    pub fn initial_dt(&mut self, low: &[Complex64], policy: &DtPolicy) -> Result<f64> {
        match policy.mode {
            StepMode::Fixed(dt) if dt > 0.0 && dt.is_finite() => Ok(dt),
            StepMode::Fixed(dt) => Err(Error::Domain(format!("time step must be positive, got {dt}"))),
            StepMode::Auto { cfl } => {
                let n = self.spec.cutoff as f64;
                let wmax = self.omega.iter().fold(0.0_f64, |m, w| m.max(w.abs()));
                let b = self.sup_norm(low)?;
                let km1 = self.spec.k as i32 - 1;
                let rate_nl = if self.spec.linear_only { 0.0 } else { n * self.spec.k as f64 * b.powi(km1) };
                let rate = rate_nl.max(wmax).max(1e-12);
                Ok((cfl / rate).min(policy.dt_max))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepMode {
    Fixed(f64),
    /// `dt = cfl / max(N k ‖u_N‖_∞^{k-1}, max_n |ω(n)|)`.
    Auto { cfl: f64 },
}

/// Step-size policy with halving on energy drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtPolicy {
    pub mode: StepMode,
    pub dt_max: f64,
    /// Largest accepted relative energy drift over a run.
    pub drift_tol: f64,
    pub max_halvings: u32,
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy { mode: StepMode::Auto { cfl: 0.5 }, dt_max: 0.01, drift_tol: 1e-6, max_halvings: 8 }
    }
}

/// Per-snapshot diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    pub mean: f64,
    pub low_l2: f64,
    pub hamiltonian: f64,
    pub sobolev: f64,
}

/// Snapshot layout of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub dt: DtPolicy,
    /// Number of intervals between snapshots; `snapshots + 1` records including `t = 0`.
    pub snapshots: usize,
    /// Sobolev index for the `H^s` diagnostic.
    pub sobolev_s: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { dt: DtPolicy::default(), snapshots: 10, sobolev_s: -0.5 }
    }
}

/// Times, fields and diagnostics of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub spec: EvolutionSpec,
    pub times: Vec<f64>,
    pub snapshots: Vec<SpectralField>,
    pub diagnostics: Vec<Diagnostics>,
    pub dt: f64,
    pub halvings: u32,
}

impl TrajectoryRecord {
    pub fn final_field(&self) -> &SpectralField {
        self.snapshots.last().expect("trajectory has at least one snapshot")
    }

    /// Largest `|E(t) - E(0)| / max(|E(0)|, kinetic(0))`.
    pub fn energy_drift(&self) -> f64 {
        let h0 = self.diagnostics[0].hamiltonian;
        let scale = h0.abs().max(f64::MIN_POSITIVE);
        self.diagnostics.iter().map(|d| (d.hamiltonian - h0).abs()).fold(0.0, f64::max) / scale
    }

    /// Largest relative change of the low-mode L² mass.
    pub fn l2_drift(&self) -> f64 {
        let m0 = self.diagnostics[0].low_l2;
        let d = self.diagnostics.iter().map(|d| (d.low_l2 - m0).abs()).fold(0.0, f64::max);
        if m0 > 0.0 {
            d / m0
        } else {
            d
        }
    }

    /// CSV with columns `t,mean,low_l2,hamiltonian,sobolev`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,mean,low_l2,hamiltonian,sobolev")?;
        for d in &self.diagnostics {
            writeln!(w, "{:e},{:e},{:e},{:e},{:e}", d.t, d.mean, d.low_l2, d.hamiltonian, d.sobolev)?;
        }
        Ok(())
    }

    pub fn manifest(&self, seed: Option<u64>, horizon: f64, opts: &EvolveOptions) -> TrajectoryManifest {
        TrajectoryManifest {
            spec: self.spec,
            seed,
            horizon,
            options: *opts,
            dt: self.dt,
            halvings: self.halvings,
            energy_drift: self.energy_drift(),
            l2_drift: self.l2_drift(),
        }
    }
}

/// JSON companion of a trajectory CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub spec: EvolutionSpec,
    pub seed: Option<u64>,
    pub horizon: f64,
    pub options: EvolveOptions,
    pub dt: f64,
    pub halvings: u32,
    pub energy_drift: f64,
    pub l2_drift: f64,
}

impl TrajectoryManifest {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }
}

fn rotate_high(field0: &SpectralField, n_low: usize, family: Family, t: f64, out: &mut [Complex64]) -> Result<()> {
    for (i, c) in field0.coeffs().iter().enumerate().skip(n_low) {
        let w = linear_frequency(family, (i + 1) as i64)?;
        out[i] = c * Complex64::from_polar(1.0, w * t);
    }
    Ok(())
}

/// One step of size `dt` (signed); high modes rotate exactly.
pub fn step(field: &SpectralField, spec: &EvolutionSpec, dt: f64) -> Result<SpectralField> {
    let mut integ = Integrator::new(*spec)?;
    let n = spec.cutoff.min(field.cutoff());
    let mut coeffs = field.coeffs().to_vec();
    let mut low = field.with_cutoff(spec.cutoff).into_coeffs();
    integ.advance(&mut low, dt, 1)?;
    coeffs[..n].copy_from_slice(&low[..n]);
    rotate_high(field, spec.cutoff, spec.family, dt, &mut coeffs)?;
    Ok(SpectralField::new(coeffs))
}

fn run(
    integ: &mut Integrator,
    field: &SpectralField,
    horizon: f64,
    dt: f64,
    opts: &EvolveOptions,
) -> Result<TrajectoryRecord> {
    let spec = *integ.spec();
    let n = spec.cutoff;
    let intervals = opts.snapshots.max(1);
    let span = horizon / intervals as f64;
    let steps = if span == 0.0 { 0 } else { (span.abs() / dt).ceil().max(1.0) as usize };
    let h = if steps == 0 { 0.0 } else { span / steps as f64 };
    let mut low = field.with_cutoff(n).into_coeffs();
    let mut coeffs = field.coeffs().to_vec();
    let mut rec = TrajectoryRecord {
        spec,
        times: Vec::with_capacity(intervals + 1),
        snapshots: Vec::with_capacity(intervals + 1),
        diagnostics: Vec::with_capacity(intervals + 1),
        dt: h.abs(),
        halvings: 0,
    };
    for j in 0..=intervals {
        if j > 0 {
            integ.advance(&mut low, h, steps)?;
        }
        let t = span * j as f64;
        let m = n.min(coeffs.len());
        coeffs[..m].copy_from_slice(&low[..m]);
        rotate_high(field, n, spec.family, t, &mut coeffs)?;
        let snap = SpectralField::new(coeffs.clone());
        rec.diagnostics.push(Diagnostics {
            t,
            mean: snap.mean(),
            low_l2: low_l2(&low),
            hamiltonian: integ.energy(&low)?,
            sobolev: snap.sobolev_norm(opts.sobolev_s),
        });
        rec.times.push(t);
        rec.snapshots.push(snap);
    }
    Ok(rec)
}

/// Evolves `field` to time `horizon` (negative runs backwards).
///
/// The run is repeated with half the step while the relative energy drift
/// exceeds `opts.dt.drift_tol`.
pub fn evolve(field: &SpectralField, spec: &EvolutionSpec, horizon: f64, opts: &EvolveOptions) -> Result<TrajectoryRecord> {
    let mut integ = Integrator::new(*spec)?;
    evolve_with(&mut integ, field, horizon, opts)
}

/// [`evolve`] reusing an integrator's buffers.
pub fn evolve_with(
    integ: &mut Integrator,
    field: &SpectralField,
    horizon: f64,
    opts: &EvolveOptions,
) -> Result<TrajectoryRecord> {
    let low = field.with_cutoff(integ.spec().cutoff).into_coeffs();
    let mut dt = integ.initial_dt(&low, &opts.dt)?;
    let mut last = 0.0;
    for halvings in 0..=opts.dt.max_halvings {
        let mut rec = run(integ, field, horizon, dt, opts)?;
        last = rec.energy_drift();
        if last <= opts.dt.drift_tol {
            rec.halvings = halvings;
            return Ok(rec);
        }
        log::debug!("energy drift {last:.3e} at dt={dt:.3e}; halving");
        dt *= 0.5;
    }
    Err(Error::StepRejected { time: horizon, halvings: opts.dt.max_halvings, drift: last })
}

/// Observable evaluated before and after the flow.
pub struct Observable<'a> {
    pub name: &'a str,
    pub eval: &'a dyn Fn(&SpectralField) -> f64,
}

/// Before/after comparison of one observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableReport {
    pub name: String,
    pub before: Estimate,
    pub after: Estimate,
    pub diff: f64,
    pub combined_se: f64,
    /// Standard error of the weighted mean of per-member differences.
    pub paired_se: f64,
    pub pass: bool,
}

/// Outcome of a statistical invariance test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub spec: EvolutionSpec,
    pub density: DensitySpec,
    pub members: usize,
    pub ess: f64,
    pub horizon: f64,
    pub z: f64,
    pub observables: Vec<ObservableReport>,
    /// Largest per-trajectory `|Δ ‖P_N u‖²_{L²}|`.
    pub max_l2_drift: f64,
    pub max_energy_drift: f64,
    pub pass: bool,
}

/// The default observables: `∫W(u²)`, `‖u‖²_{H^{-1/2}}` and `Re(û(1)² conj û(2))`.
pub fn standard_observables(ctx: &WickContext) -> Vec<(String, Box<dyn Fn(&SpectralField) -> f64>)> {
    let two_pi_sigma = 2.0 * PI * ctx.sigma.sigma;
    let n = ctx.cutoff;
    vec![
        ("wick_mass".into(), Box::new(move |f: &SpectralField| f.project(n).l2_sq() - two_pi_sigma)),
        ("h_minus_half".into(), Box::new(move |f: &SpectralField| f.project(n).sobolev_norm_sq(-0.5))),
        ("triad_1_1_2".into(), Box::new(|f: &SpectralField| (f.coeff(1) * f.coeff(1) * f.coeff(2).conj()).re)),
    ]
}

/// Evolves every member of a Gibbs ensemble and compares weighted means of each observable.
pub fn invariance_test(
    spec: &EvolutionSpec,
    ensemble: &WeightedEnsemble,
    observables: &[Observable<'_>],
    horizon: f64,
    opts: &EvolveOptions,
    z: f64,
) -> Result<InvarianceReport> {
    if ensemble.is_empty() {
        return Err(Error::DegenerateEnsemble("empty ensemble".into()));
    }
    let mut integ = Integrator::new(*spec)?;
    let run_opts = EvolveOptions { snapshots: 1, ..*opts };
    let mut finals = Vec::with_capacity(ensemble.len());
    let mut max_l2 = 0.0_f64;
    let mut max_energy = 0.0_f64;
    for f in &ensemble.fields {
        let rec = evolve_with(&mut integ, f, horizon, &run_opts)?;
        let d = &rec.diagnostics;
        max_l2 = max_l2.max((d[d.len() - 1].low_l2 - d[0].low_l2).abs());
        max_energy = max_energy.max(rec.energy_drift());
        finals.push(rec.snapshots.into_iter().next_back().expect("final snapshot"));
    }
    let mut reports = Vec::with_capacity(observables.len());
    for obs in observables {
        let before_v: Vec<f64> = ensemble.fields.iter().map(obs.eval).collect();
        let after_v: Vec<f64> = finals.iter().map(obs.eval).collect();
        let before = ensemble.expect_values(&before_v);
        let after = ensemble.expect_values(&after_v);
        let diffs: Vec<f64> = after_v.iter().zip(&before_v).map(|(a, b)| a - b).collect();
        let paired = weighted_mean_se(&ensemble.weights, &diffs);
        let diff = after.value - before.value;
        let combined_se = before.combined_se(&after);
        reports.push(ObservableReport {
            name: obs.name.to_string(),
            before,
            after,
            diff,
            combined_se,
            paired_se: paired.stderr,
            pass: diff.abs() <= z * combined_se,
        });
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok(InvarianceReport {
        spec: *spec,
        density: ensemble.spec,
        members: ensemble.len(),
        ess: ensemble.ess,
        horizon,
        z,
        observables: reports,
        max_l2_drift: max_l2,
        max_energy_drift: max_energy,
        pass,
    })
}

/// Draws a Gibbs ensemble by importance sampling and runs [`invariance_test`]
/// with the standard observables at 3 standard errors.
pub fn invariance_study(
    spec: &EvolutionSpec,
    density: &DensitySpec,
    members: usize,
    horizon: f64,
    opts: &EvolveOptions,
    rng: &SeededRng,
) -> Result<InvarianceReport> {
    if members < 1000 {
        return Err(Error::Domain(format!("invariance test needs at least 1000 members, got {members}")));
    }
    let ctx = spec.wick_context()?;
    let ens = snis_sample(&ctx, density, members, rng)?;
    let obs = standard_observables(&ctx);
    let refs: Vec<Observable<'_>> = obs.iter().map(|(n, f)| Observable { name: n, eval: f.as_ref() }).collect();
    invariance_test(spec, &ens, &refs, horizon, opts, 3.0)
}

/// Which limit a trajectory study approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Limit {
    /// `δ → ∞`: gILW against gBO with `X_δ` and `X_BO` built from the same Gaussians.
    Deep,
    /// `δ → 0`: scaled gILW against gKdV with `X̃_δ` and `X_KdV` from the same Gaussians.
    Shallow,
}

/// One row of a limit study; gaps are averaged over the coupled draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub delta: f64,
    /// Mean over draws of `sup_t ‖u_δ(t) - u_lim(t)‖_{H^s}` on the snapshot times.
    pub sup_gap: Estimate,
    pub initial_gap: f64,
    pub final_gap: f64,
}

/// Parameters of a limit study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitStudy {
    pub limit: Limit,
    pub k: usize,
    pub cutoff: usize,
    pub horizon: f64,
    pub s: f64,
    pub seed: u64,
    /// Number of coupled initial draws; one draw uses `seed` directly,
    /// several use the members `0..draws` of `seed`.
    pub draws: usize,
}

/// Sup-in-time `H^s` gaps between coupled trajectories of the `δ`-family and its limit.
pub fn limit_study(study: &LimitStudy, deltas: &[f64], opts: &EvolveOptions) -> Result<Vec<LimitRow>> {
    if study.draws == 0 {
        return Err(Error::Domain("limit study needs at least one draw".into()));
    }
    let base = SeededRng::new(study.seed);
    let sources: Vec<SeededRng> = if study.draws == 1 {
        vec![base]
    } else {
        (0..study.draws as u64).map(|i| base.member(i)).collect()
    };
    let limit_family = match study.limit {
        Limit::Deep => Family::DeepGILW(DepthParam::Infinite),
        Limit::Shallow => Family::ScaledGILW(DepthParam::Shallow),
    };
    let family_at = |delta: f64| match study.limit {
        Limit::Deep => Family::DeepGILW(DepthParam::Finite(delta)),
        Limit::Shallow => Family::ScaledGILW(DepthParam::Finite(delta)),
    };
    let trajectory = |family: Family, g: &[Complex64]| -> Result<TrajectoryRecord> {
        let spec = EvolutionSpec::new(family, study.k, study.cutoff)?;
        let u0 = SpectralField::from_gaussians(family.field_kind()?, g)?;
        evolve(&u0, &spec, study.horizon, opts)
    };
    let mut sup = vec![Vec::with_capacity(sources.len()); deltas.len()];
    let mut first = vec![0.0; deltas.len()];
    let mut last = vec![0.0; deltas.len()];
    for src in &sources {
        let g = src.draw(study.cutoff);
        let reference = trajectory(limit_family, &g)?;
        for (j, &delta) in deltas.iter().enumerate() {
            let rec = trajectory(family_at(delta), &g)?;
            let gaps: Vec<f64> = rec
                .snapshots
                .iter()
                .zip(&reference.snapshots)
                .map(|(a, b)| a.sub(b).sobolev_norm(study.s))
                .collect();
            sup[j].push(gaps.iter().cloned().fold(0.0, f64::max));
            first[j] += gaps[0] / sources.len() as f64;
            last[j] += gaps[gaps.len() - 1] / sources.len() as f64;
        }
    }
    Ok(deltas
        .iter()
        .enumerate()
        .map(|(j, &delta)| {
            let e = if sup[j].len() > 1 { mean_se(&sup[j]) } else { Estimate::exact(sup[j][0]) };
            LimitRow { delta, sup_gap: e, initial_gap: first[j], final_gap: last[j] }
        })
        .collect())
}
