//! The fourteen acceptance criteria, each returning a pass/fail record.

use std::f64::consts::PI;
use std::time::Instant;

use ilw_core::dispersion::{k_delta, l_delta, mittag_leffler_l, mittag_leffler_tail_bound};
use ilw_core::dynamics::{
    evolve, invariance_study, limit_study, DtPolicy, EvolutionSpec, EvolveOptions, Family, Limit, LimitStudy,
    StepMode,
};
use ilw_core::field::{sample_field, FieldKind, GaussianSource, SeededRng, SpectralField};
use ilw_core::gibbs::{
    base_ensemble, field_covariance, log_densities, mh_sample, snis_sample, tamed_constant, DensitySpec, MhOptions,
    SamplerInfo, WickContext,
};
use ilw_core::hermite::{hermite, hermite_shift_check, sigma_deep, sigma_kdv, sigma_shallow};
use ilw_core::metrics::{kakutani_partial_sums, kl_deep, pinsker_check, ProductGaussianSpec};
use ilw_core::stats::{mean_se, Estimate};
use ilw_core::{Depth, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::experiments::{
    cutoff_refinement_tv, deep_gibbs_tv, density_second_moment, shallow_energy_distance, shallow_ky_fan, wick_mass,
};

/// Sample sizes and horizons: `Full` uses the stated values, `Quick` smaller ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Full,
    Quick,
}

impl Scale {
    fn pick<T>(self, full: T, quick: T) -> T {
        match self {
            Scale::Full => full,
            Scale::Quick => quick,
        }
    }
}

/// Criterion ids and short names.
pub const CRITERIA: [(u8, &str); 14] = [
    (1, "symbol-sandwich"),
    (2, "mittag-leffler"),
    (3, "wick-constants"),
    (4, "hermite-identities"),
    (5, "chaos-orthogonality"),
    (6, "deep-gaussian-kl"),
    (7, "gibbs-tv-in-cutoff"),
    (8, "gibbs-tv-in-depth"),
    (9, "shallow-dichotomy"),
    (10, "conservation"),
    (11, "statistical-invariance"),
    (12, "trajectory-limits"),
    (13, "cutoff-measure"),
    (14, "uniform-moment"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub metrics: Value,
    pub seconds: f64,
}

impl CriterionResult {
    /// One-line summary such as `PASS  03 wick-constants  0.01s  ...`.
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        format!("{verdict}  {:02} {:<24} {:>8.2}s  {}", self.id, self.name, self.seconds, self.detail)
    }
}

/// Every result of one suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub scale: Scale,
    pub version: String,
    pub pass: bool,
    pub results: Vec<CriterionResult>,
}

struct Outcome {
    pass: bool,
    detail: String,
    metrics: Value,
}

pub fn run_criterion(id: u8, scale: Scale) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1).to_string();
    let start = Instant::now();
    let out = match id {
        1 => symbol_sandwich(),
        2 => mittag_leffler(),
        3 => wick_constants(),
        4 => hermite_identities(),
        5 => chaos_orthogonality(scale),
        6 => deep_gaussian_kl(),
        7 => gibbs_tv_in_cutoff(scale),
        8 => gibbs_tv_in_depth(scale),
        9 => shallow_dichotomy(scale),
        10 => conservation(scale),
        11 => statistical_invariance(scale),
        12 => trajectory_limits(scale),
        13 => cutoff_measure(scale),
        14 => uniform_moment(scale),
        _ => Err(ilw_core::Error::Domain(format!("no criterion {id}"))),
    };
    let out = out.unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}"), metrics: Value::Null });
    CriterionResult { id, name, pass: out.pass, detail: out.detail, metrics: out.metrics, seconds: start.elapsed().as_secs_f64() }
}

/// Runs the listed criteria (all when `ids` is empty) in order.
pub fn run_suite(scale: Scale, ids: &[u8], mut on_result: impl FnMut(&CriterionResult)) -> AcceptanceReport {
    let mut results = Vec::new();
    for &(id, _) in CRITERIA.iter().filter(|c| ids.is_empty() || ids.contains(&c.0)) {
        let r = run_criterion(id, scale);
        on_result(&r);
        results.push(r);
    }
    AcceptanceReport {
        scale,
        version: ilw_core::VERSION.to_string(),
        pass: results.iter().all(|r| r.pass),
        results,
    }
}

/// `v[i+1] ≤ v[i] + z·SE` for consecutive pairs, and the last strictly below the first.
pub fn decreasing_within(vals: &[Estimate], z: f64) -> bool {
    let steps = vals.windows(2).all(|w| w[1].value <= w[0].value + z * w[0].combined_se(&w[1]));
    steps && vals.last().map(|l| l.value) < vals.first().map(|f| f.value)
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn symbol_sandwich() -> Result<Outcome> {
    let mut worst = f64::NEG_INFINITY;
    for &d in &[0.1, 1.0, 2.0, 10.0, 1e3] {
        let depth = Depth::Finite(d);
        for n in -1000..=1000_i64 {
            let k = k_delta(depth, n)?;
            let an = n.unsigned_abs() as f64;
            let lower = (an - 1.0 / d).max(0.0);
            worst = worst.max(lower - k).max(k - an);
        }
    }
    let grid = [1.0, 1.5, 2.0, 4.0, 10.0, 100.0, 1000.0];
    let mut monotone = true;
    for n in 1..=32 {
        let vals = grid.iter().map(|&d| k_delta(Depth::Finite(d), n)).collect::<Result<Vec<f64>>>()?;
        monotone &= vals.windows(2).all(|w| w[1] > w[0]);
    }
    let pass = worst <= 1e-12 && monotone;
    Ok(Outcome {
        pass,
        detail: format!("largest sandwich violation {worst:.1e}, monotone in delta: {monotone}"),
        metrics: json!({ "max_violation": worst, "monotone": monotone }),
    })
}

fn mittag_leffler() -> Result<Outcome> {
    let terms = 10_000_000;
    let mut worst_ratio = 0.0_f64;
    for &d in &[0.1, 1.0, 5.0] {
        for n in 1..=8 {
            let err = (l_delta(Depth::Finite(d), n)? - mittag_leffler_l(d, n, terms)).abs();
            let bound = mittag_leffler_tail_bound::<f64>(n, terms);
            worst_ratio = worst_ratio.max(err / bound);
        }
    }
    Ok(Outcome {
        pass: worst_ratio <= 1.0,
        detail: format!("largest error / tail bound = {worst_ratio:.6}"),
        metrics: json!({ "terms": terms, "max_error_over_bound": worst_ratio }),
    })
}

fn wick_constants() -> Result<Outcome> {
    let mut kdv_ok = true;
    let mut kdv = Vec::new();
    for &n in &[10usize, 100, 1000] {
        let err = (sigma_kdv::<f64>(n)?.sigma - PI / 6.0).abs();
        kdv_ok &= err <= 1.0 / (PI * n as f64);
        kdv.push(json!({ "N": n, "error": err, "bound": 1.0 / (PI * n as f64) }));
    }
    let mut worst = 0.0_f64;
    for &d in &[0.1, 0.5, 1.0, 2.0, 10.0] {
        for &n in &[10usize, 100, 1000] {
            let deep = sigma_deep(Depth::Finite(d), n)?.sigma;
            let shallow = sigma_shallow(Depth::Finite(d), n)?.sigma;
            worst = worst.max((shallow - d / 3.0 * deep).abs() / shallow);
        }
    }
    Ok(Outcome {
        pass: kdv_ok && worst <= 1e-14,
        detail: format!("KdV truncation within 1/(pi N): {kdv_ok}; scaled-variance relative error {worst:.1e}"),
        metrics: json!({ "kdv": kdv, "scaled_relative_error": worst }),
    })
}

/// `k! [t^k] exp(tx) exp(-σt²/2)` by Cauchy product of the two power series.
fn generating_coefficient(k: usize, x: f64, sigma: f64) -> f64 {
    let fact = |n: usize| (1..=n).map(|j| j as f64).product::<f64>();
    let mut c = 0.0;
    for m in 0..=k / 2 {
        let j = k - 2 * m;
        c += x.powi(j as i32) / fact(j) * (-sigma / 2.0).powi(m as i32) / fact(m);
    }
    c * fact(k)
}

fn hermite_identities() -> Result<Outcome> {
    let (mut gen, mut scale, mut shift) = (0.0_f64, 0.0_f64, 0.0_f64);
    for k in 0..=10 {
        for &x in &[-2.5, -0.3, 0.0, 0.7, 1.9, 3.2] {
            for &s in &[0.1, 0.5, 1.0, 2.7] {
                let g = generating_coefficient(k, x, s);
                gen = gen.max((hermite(k, x, s)? - g).abs() / (1.0 + g.abs()));
                let lhs = hermite(k, x, s)?;
                let rhs = s.powf(k as f64 / 2.0) * hermite(k, x / s.sqrt(), 1.0)?;
                scale = scale.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
            }
        }
        for &(x, y) in &[(0.5, -1.2), (2.0, 0.3), (-1.1, -0.9), (0.0, 1.7)] {
            let (l, r) = hermite_shift_check(k, x, y, 0.8_f64)?;
            shift = shift.max((l - r).abs() / (1.0 + l.abs()));
        }
    }
    Ok(Outcome {
        pass: gen <= 1e-8 && scale <= 1e-12 && shift <= 1e-9,
        detail: format!("generating {gen:.1e}, scaling {scale:.1e}, shift {shift:.1e}"),
        metrics: json!({ "generating": gen, "scaling": scale, "shift": shift }),
    })
}

fn chaos_orthogonality(scale: Scale) -> Result<Outcome> {
    let n = 8;
    let kind = FieldKind::DeepGauss(Depth::Finite(2.0));
    let s = kind.wick_variance(n)?.sigma;
    let (x, y) = (0.0, 2.0 * PI * 3.0 / 16.0);
    let gamma = field_covariance(kind, n, x - y)?;
    let rng = SeededRng::new(501);
    let samples = scale.pick(100_000, 20_000);
    let pts: Vec<(f64, f64)> = (0..samples as u64)
        .map(|i| SpectralField::from_gaussians(kind, &rng.member(i).draw(n)).map(|u| (u.eval(x), u.eval(y))))
        .collect::<Result<_>>()?;
    let mut worst = 0.0_f64;
    let mut cells = Vec::new();
    for k in 1..=3 {
        for m in 1..=3 {
            let prod = pts.iter().map(|&(a, b)| Ok(hermite(k, a, s)? * hermite(m, b, s)?)).collect::<Result<Vec<f64>>>()?;
            let e = mean_se(&prod);
            let fact: f64 = (1..=k).map(|j| j as f64).product();
            let expect = if k == m { fact * gamma.powi(k as i32) } else { 0.0 };
            let z = (e.value - expect).abs() / e.stderr;
            worst = worst.max(z);
            cells.push(json!({ "k": k, "m": m, "mc": e.value, "se": e.stderr, "exact": expect }));
        }
    }
    Ok(Outcome {
        pass: worst <= 5.0,
        detail: format!("largest deviation {worst:.2} SE over 9 cells, {samples} samples"),
        metrics: json!({ "samples": samples, "cells": cells, "max_z": worst }),
    })
}

fn deep_gaussian_kl() -> Result<Outcome> {
    let modes = 10_000;
    let deltas: Vec<f64> = (1..=10).map(|j| 2f64.powi(j)).collect();
    let mut kl = Vec::new();
    let mut ordered = true;
    for &d in &deltas {
        kl.push(kl_deep(d, modes)?.value);
        ordered &= pinsker_check(d, modes)?.ordered;
    }
    let ratio = kl[kl.len() - 1] / kl[0];
    let mono = strictly_decreasing(&kl);
    Ok(Outcome {
        pass: mono && ratio <= 1e-4 && ordered,
        detail: format!("strictly decreasing: {mono}, KL(1024)/KL(2) = {ratio:.2e}, Hellinger ≤ sqrt(KL/2): {ordered}"),
        metrics: json!({ "deltas": deltas, "kl": kl, "ratio": ratio, "pinsker_ordered": ordered }),
    })
}

fn estimates_json(xs: &[f64], name: &str, es: &[Estimate]) -> Value {
    Value::Array(
        xs.iter()
            .zip(es)
            .map(|(x, e)| json!({ name: x, "value": e.value, "se": e.stderr }))
            .collect(),
    )
}

fn gibbs_tv_in_cutoff(scale: Scale) -> Result<Outcome> {
    let kind = FieldKind::DeepGauss(Depth::Finite(2.0));
    let samples = scale.pick(100_000, 20_000);
    let ns = [8.0, 16.0, 32.0];
    let tv = ns
        .iter()
        .map(|&n| cutoff_refinement_tv(kind, 3, n as usize, &DensitySpec::Defocusing, samples, 701))
        .collect::<Result<Vec<_>>>()?;
    let pass = decreasing_within(&tv, 3.0);
    Ok(Outcome {
        pass,
        detail: format!(
            "TV(N,2N) = {}",
            tv.iter().map(|e| format!("{:.4}±{:.4}", e.value, e.stderr)).collect::<Vec<_>>().join(", ")
        ),
        metrics: json!({ "samples": samples, "tv": estimates_json(&ns, "N", &tv) }),
    })
}

fn gibbs_tv_in_depth(scale: Scale) -> Result<Outcome> {
    let samples = scale.pick(100_000, 20_000);
    let deltas = [2.0, 8.0, 32.0];
    let tv = deltas
        .iter()
        .map(|&d| deep_gibbs_tv(3, 16, d, &DensitySpec::Defocusing, samples, 801))
        .collect::<Result<Vec<_>>>()?;
    let pass = decreasing_within(&tv, 3.0);
    Ok(Outcome {
        pass,
        detail: format!(
            "TV(delta, inf) = {}",
            tv.iter().map(|e| format!("{:.4}±{:.4}", e.value, e.stderr)).collect::<Vec<_>>().join(", ")
        ),
        metrics: json!({ "samples": samples, "tv": estimates_json(&deltas, "delta", &tv) }),
    })
}

fn shallow_dichotomy(scale: Scale) -> Result<Outcome> {
    let a = ProductGaussianSpec::<f64>::scaled(Depth::Finite(1.0), 2000)?;
    let b = ProductGaussianSpec::<f64>::scaled(Depth::Shallow, 2000)?;
    let sums = kakutani_partial_sums(&a, &b)?;
    let growth: Vec<f64> = [100usize, 1000].iter().map(|&m| sums[2 * m - 1] / sums[m - 1]).collect();
    let diverges = growth.iter().all(|&g| g >= 1.5);

    let deltas = [1.0, 0.3, 0.1, 0.03];
    let kf = deltas
        .iter()
        .map(|&d| shallow_ky_fan(64, d, -0.5, scale.pick(4000, 1000), 901))
        .collect::<Result<Vec<_>>>()?;
    let kf_dec = strictly_decreasing(&kf.iter().map(|e| e.value).collect::<Vec<_>>());
    let ed = deltas
        .iter()
        .map(|&d| shallow_energy_distance(3, 16, d, &DensitySpec::Defocusing, scale.pick(4000, 1000), 902))
        .collect::<Result<Vec<_>>>()?;
    let ed_dec = strictly_decreasing(&ed);
    Ok(Outcome {
        pass: diverges && kf_dec && ed_dec,
        detail: format!(
            "S_2M/S_M = {:.2}, {:.2}; Ky-Fan {}; energy distance {}",
            growth[0],
            growth[1],
            kf.iter().map(|e| format!("{:.3}", e.value)).collect::<Vec<_>>().join(" > "),
            ed.iter().map(|e| format!("{e:.3}")).collect::<Vec<_>>().join(" > "),
        ),
        metrics: json!({
            "kakutani_growth": growth,
            "ky_fan": estimates_json(&deltas, "delta", &kf),
            "energy_distance": ed,
        }),
    })
}

fn auto(cfl: f64, snapshots: usize) -> EvolveOptions {
    EvolveOptions {
        dt: DtPolicy { mode: StepMode::Auto { cfl }, dt_max: 0.01, drift_tol: 1e-6, max_halvings: 4 },
        snapshots,
        sobolev_s: -0.5,
    }
}

fn conservation(scale: Scale) -> Result<Outcome> {
    let (n, high) = (32, 48);
    let family = Family::DeepGILW(Depth::Finite(2.0));
    let spec = EvolutionSpec::new(family, 3, n)?;
    let u0 = sample_field(family.field_kind()?, high, &SeededRng::new(1001))?;
    let horizon = scale.pick(10.0, 2.0);
    let rec = evolve(&u0, &spec, horizon, &auto(0.05, 20))?;
    let mean_zero = rec.diagnostics.iter().all(|d| d.mean == 0.0);
    let mut amp = 0.0_f64;
    for snap in &rec.snapshots {
        for (a, b) in snap.coeffs()[n..].iter().zip(&u0.coeffs()[n..]) {
            amp = amp.max((a.norm() - b.norm()).abs());
        }
    }
    let rev_t = 1.0;
    let fwd = evolve(&u0, &spec, rev_t, &auto(0.005, 1))?;
    let back = evolve(fwd.final_field(), &spec, -rev_t, &auto(0.005, 1))?;
    let rev = back.final_field().sub(&u0).l2_sq().sqrt() / u0.l2_sq().sqrt();
    let (l2, energy) = (rec.l2_drift(), rec.energy_drift());
    Ok(Outcome {
        pass: mean_zero && l2 <= 1e-8 && energy <= 1e-8 && amp <= 1e-14 && rev <= 1e-8,
        detail: format!(
            "T={horizon}: mean 0 {mean_zero}, L2 {l2:.1e}, energy {energy:.1e}, high modes {amp:.1e}; reversal over T={rev_t}: {rev:.1e}"
        ),
        metrics: json!({
            "horizon": horizon, "dt": rec.dt, "mean_zero": mean_zero, "l2_drift": l2,
            "energy_drift": energy, "high_mode_drift": amp, "reversal_horizon": rev_t, "reversal_error": rev,
        }),
    })
}

fn statistical_invariance(scale: Scale) -> Result<Outcome> {
    let spec = EvolutionSpec::new(Family::DeepGILW(Depth::Finite(2.0)), 3, 8)?;
    let members = scale.pick(100_000, 10_000);
    let mut opts = auto(0.5, 1);
    opts.dt.drift_tol = 1e-4;
    let r = invariance_study(&spec, &DensitySpec::Defocusing, members, 1.0, &opts, &SeededRng::new(1101))?;
    let detail = r
        .observables
        .iter()
        .map(|o| format!("{} {:+.2} SE", o.name, o.diff / o.combined_se))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(Outcome {
        pass: r.pass,
        detail: format!("{detail}; ESS {:.0} of {members}", r.ess),
        metrics: serde_json::to_value(&r).unwrap_or(Value::Null),
    })
}

fn trajectory_limits(_scale: Scale) -> Result<Outcome> {
    let opts = EvolveOptions::default();
    let deep = LimitStudy { limit: Limit::Deep, k: 3, cutoff: 16, horizon: 1.0, s: -0.5, seed: 7, draws: 16 };
    let dd = [2.0, 8.0, 32.0, 128.0];
    let deep_rows = limit_study(&deep, &dd, &opts)?;
    let single = limit_study(&LimitStudy { draws: 1, ..deep }, &dd, &opts)?;
    let shallow = LimitStudy { limit: Limit::Shallow, ..deep };
    let sd = [0.3, 0.1, 0.03, 0.01];
    let shallow_rows = limit_study(&shallow, &sd, &opts)?;

    let dg: Vec<f64> = deep_rows.iter().map(|r| r.sup_gap.value).collect();
    let sg: Vec<f64> = shallow_rows.iter().map(|r| r.sup_gap.value).collect();
    let single_g: Vec<f64> = single.iter().map(|r| r.sup_gap.value).collect();
    let deep_ok = strictly_decreasing(&dg) && dg[3] <= 0.1 * dg[0];
    let shallow_ok = strictly_decreasing(&sg);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" > ");
    Ok(Outcome {
        pass: deep_ok && shallow_ok,
        detail: format!(
            "deep {} (ratio {:.3}); shallow {}; single draw deep {}",
            fmt(&dg),
            dg[3] / dg[0],
            fmt(&sg),
            fmt(&single_g)
        ),
        metrics: json!({ "draws": deep.draws, "deep": deep_rows, "shallow": shallow_rows, "deep_single_draw": single }),
    })
}

fn cutoff_measure(scale: Scale) -> Result<Outcome> {
    let kind = FieldKind::DeepGauss(Depth::Finite(2.0));
    let ctx = WickContext::new(2, 16, kind)?;
    let (k_cut, a) = (1.0, 0.5);
    let cutoff = DensitySpec::CutoffCubic { k_cut };

    let fields = base_ensemble(kind, 16, 10_000, &SeededRng::new(1301))?;
    let g = log_densities(&fields, &ctx, &cutoff)?;
    let t = log_densities(&fields, &ctx, &DensitySpec::TamedCubic { a })?;
    let log_c = tamed_constant(a, k_cut).ln();
    let bound_ok = g.iter().zip(&t).all(|(x, y)| *x <= log_c + y + 1e-12);

    let samples = scale.pick(400_000, 100_000);
    let snis = snis_sample(&ctx, &cutoff, samples, &SeededRng::new(1302))?;
    let limit = 2.0 * PI * ctx.sigma.sigma + 2.0 * k_cut;
    let support_ok = snis.fields.iter().zip(&snis.weights).all(|(f, w)| *w == 0.0 || f.l2_sq() <= limit);
    let mh = mh_sample(&ctx, &cutoff, &MhOptions::new(samples, 0.5), &SeededRng::new(1303))?;
    let obs = wick_mass(&ctx);
    let (es, em) = (snis.expect(&obs), mh.expect(&obs));
    let z = (es.value - em.value).abs() / es.combined_se(&em);
    let acceptance = match mh.sampler {
        SamplerInfo::Mh { acceptance, .. } => acceptance,
        _ => f64::NAN,
    };
    Ok(Outcome {
        pass: bound_ok && support_ok && z <= 3.0,
        detail: format!(
            "tamed bound {bound_ok}, support {support_ok}, Wick mass SNIS {:.4} vs MH {:.4} ({z:.2} SE), MH acceptance {acceptance:.2}",
            es.value, em.value
        ),
        metrics: json!({
            "k_cut": k_cut, "a": a, "bound_holds": bound_ok, "support_holds": support_ok,
            "snis": es, "mh": em, "z": z, "ess": snis.ess, "mh_acceptance": acceptance, "samples": samples,
        }),
    })
}

fn uniform_moment(scale: Scale) -> Result<Outcome> {
    let samples = scale.pick(20_000, 5000);
    let depths = [Depth::Finite(2.0), Depth::Finite(8.0), Depth::Finite(32.0), Depth::Infinite];
    let mut cells = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for (i, &d) in depths.iter().enumerate() {
        for (j, &n) in [8usize, 32, 128].iter().enumerate() {
            let e = density_second_moment(3, n, d, samples, 1401 + (3 * i + j) as u64)?;
            lo = lo.min(e.value);
            hi = hi.max(e.value);
            cells.push(json!({ "delta": d.to_string(), "N": n, "value": e.value, "se": e.stderr }));
        }
    }
    let spread = hi / lo;
    Ok(Outcome {
        pass: spread < 3.0,
        detail: format!("E[G^2] ranges over [{lo:.3e}, {hi:.3e}], spread {spread:.2e} (need < 3)"),
        metrics: json!({ "samples": samples, "cells": cells, "spread": spread }),
    })
}
