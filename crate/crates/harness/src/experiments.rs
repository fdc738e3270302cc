//! Seeded experiments behind each CLI command.

use std::f64::consts::PI;

use ilw_core::dispersion::{h_shallow, k_delta, l_delta};
use ilw_core::dynamics::{
    evolve, invariance_study, limit_study, InvarianceReport, Limit, LimitStudy, TrajectoryRecord,
};
use ilw_core::field::{deep_limit_gap, sample_field, FieldKind, SeededRng, SpectralField};
use ilw_core::gibbs::{
    base_ensemble, log_densities, mh_sample, snis_sample, DensitySpec, MhOptions, WeightedEnsemble, WickContext,
};
use ilw_core::hermite::{hermite_shift_check, sigma_deep, sigma_kdv, sigma_kdv_limit, sigma_shallow};
use ilw_core::metrics::{
    hellinger_distance, kakutani_sum, kl_deep, ky_fan, log_rn_deep, pinsker_check, scheffe_tv,
    weak_marginal_distance, ProductGaussianSpec,
};
use ilw_core::stats::{mean_se, Estimate};
use ilw_core::{Depth, Result};

use crate::config::{depth_of, ExperimentConfig, SamplerKind};
use crate::report::{Row, Table};

/// `K_δ`, and for finite depth `L_δ` and `h`, at `n = 1..nmax`.
pub fn symbols(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::default();
    for &delta in &cfg.deltas {
        let depth = depth_of(delta)?;
        let series = format!("delta={delta}");
        for n in 1..=cfg.nmax as i64 {
            let x = n as f64;
            if !matches!(depth, Depth::Shallow) {
                t.push(Row::exact(&series, "n", x, "K", k_delta(depth, n)?));
            }
            if !matches!(depth, Depth::Infinite) {
                t.push(Row::exact(&series, "n", x, "L", l_delta(depth, n)?));
            }
            if let Depth::Finite(_) = depth {
                t.push(Row::exact(&series, "n", x, "h", h_shallow(depth, n)?));
            }
        }
    }
    Ok(t)
}

/// Wick variances over the depth grid and the Hermite shift residual.
pub fn wick(cfg: &ExperimentConfig) -> Result<Table> {
    let n = cfg.cutoff;
    let mut t = Table::default();
    for &delta in &cfg.deltas {
        let depth = depth_of(delta)?;
        let series = format!("N={n}");
        match depth {
            Depth::Shallow => {
                t.push(Row::exact(&series, "delta", 0.0, "sigma_kdv", sigma_kdv::<f64>(n)?.sigma));
            }
            Depth::Infinite => {
                t.push(Row::exact(&series, "delta", delta, "sigma_deep", sigma_deep(depth, n)?.sigma));
            }
            Depth::Finite(_) => {
                t.push(Row::exact(&series, "delta", delta, "sigma_deep", sigma_deep(depth, n)?.sigma));
                t.push(Row::exact(&series, "delta", delta, "sigma_shallow", sigma_shallow(depth, n)?.sigma));
            }
        }
    }
    let mut worst = 0.0_f64;
    for k in 0..=10 {
        for &(x, y) in &[(0.5, -1.2), (2.0, 0.3), (-1.1, -0.9)] {
            let (l, r) = hermite_shift_check(k, x, y, 0.8_f64)?;
            worst = worst.max((l - r).abs() / (1.0 + l.abs()));
        }
    }
    t.summary = serde_json::json!({
        "sigma_kdv_limit": sigma_kdv_limit::<f64>().sigma,
        "sigma_kdv_truncated": sigma_kdv::<f64>(n)?.sigma,
        "hermite_shift_residual": worst,
    });
    Ok(t)
}

/// Gibbs ensemble under the configured density and sampler.
pub fn sample(cfg: &ExperimentConfig) -> Result<WeightedEnsemble> {
    let kind = cfg.family_at(cfg.delta()?)?.field_kind()?;
    let ctx = WickContext::new(cfg.k, cfg.cutoff, kind)?;
    let rng = SeededRng::new(cfg.seed);
    match cfg.sampler {
        SamplerKind::Snis => snis_sample(&ctx, &cfg.density_spec(), cfg.samples, &rng),
        SamplerKind::Mh => mh_sample(&ctx, &cfg.density_spec(), &MhOptions::new(cfg.samples, cfg.mh_step), &rng),
    }
}

/// Closed-form distances between deep Gaussians, the Kakutani sums of both
/// regimes and the coupled Ky-Fan distance to the Benjamin-Ono field.
pub fn distances(cfg: &ExperimentConfig) -> Result<Table> {
    let m = cfg.nmax;
    let rng = SeededRng::new(cfg.seed);
    let bo = base_ensemble(FieldKind::DeepGauss(Depth::Infinite), cfg.cutoff, cfg.samples, &rng)?;
    let mut t = Table::default();
    for &delta in &cfg.deltas {
        let depth = depth_of(delta)?;
        let Depth::Finite(d) = depth else { continue };
        let kl = kl_deep(d, m)?;
        let p = pinsker_check(d, m)?;
        let a = ProductGaussianSpec::<f64>::deep(depth, m)?;
        let b = ProductGaussianSpec::<f64>::deep(Depth::Infinite, m)?;
        let sa = ProductGaussianSpec::<f64>::scaled(depth, m)?;
        let sb = ProductGaussianSpec::<f64>::scaled(Depth::Shallow, m)?;
        let series = format!("M={m}");
        t.push(Row::exact(&series, "delta", d, "kl", kl.value));
        t.push(Row::exact(&series, "delta", d, "kl_tail_bound", kl.tail_bound));
        t.push(Row::exact(&series, "delta", d, "hellinger", hellinger_distance(&a, &b)?));
        t.push(Row::exact(&series, "delta", d, "pinsker_bound", p.bound));
        t.push(Row::exact(&series, "delta", d, "kakutani_deep", kakutani_sum(&a, &b, m)?));
        t.push(Row::exact(&series, "delta", d, "kakutani_shallow", kakutani_sum(&sa, &sb, m)?));
        let x = base_ensemble(FieldKind::DeepGauss(depth), cfg.cutoff, cfg.samples, &rng)?;
        t.push(Row::estimate(format!("N={}", cfg.cutoff), "delta", d, "ky_fan_deep", ky_fan(&x, &bo, cfg.s)?));
    }
    Ok(t)
}

/// One trajectory from a seeded draw of the configured family.
pub fn evolve_run(cfg: &ExperimentConfig) -> Result<TrajectoryRecord> {
    let family = cfg.family_at(cfg.delta()?)?;
    let spec = ilw_core::dynamics::EvolutionSpec::new(family, cfg.k, cfg.cutoff)?;
    let u0 = sample_field(family.field_kind()?, cfg.cutoff, &SeededRng::new(cfg.seed))?;
    evolve(&u0, &spec, cfg.horizon, &cfg.evolve_options())
}

pub fn invariance(cfg: &ExperimentConfig) -> Result<InvarianceReport> {
    let family = cfg.family_at(cfg.delta()?)?;
    let spec = ilw_core::dynamics::EvolutionSpec::new(family, cfg.k, cfg.cutoff)?;
    invariance_study(&spec, &cfg.density_spec(), cfg.samples, cfg.horizon, &cfg.evolve_options(), &SeededRng::new(cfg.seed))
}

/// `TV(ρ_N, ρ_{2N})` by Scheffé on base draws at cutoff `2N`.
pub fn cutoff_refinement_tv(kind: FieldKind, k: usize, n: usize, spec: &DensitySpec, samples: usize, seed: u64) -> Result<Estimate> {
    let fields = base_ensemble(kind, 2 * n, samples, &SeededRng::new(seed))?;
    let coarse = log_densities(&fields, &WickContext::new(k, n, kind)?, spec)?;
    let fine = log_densities(&fields, &WickContext::new(k, 2 * n, kind)?, spec)?;
    scheffe_tv(&coarse, &fine)
}

/// `TV(ρ_{δ,N}, ρ_{∞,N})` by Scheffé on Benjamin-Ono draws, reweighted to
/// `μ_δ` through the exact Radon-Nikodym derivative.
pub fn deep_gibbs_tv(k: usize, n: usize, delta: f64, spec: &DensitySpec, samples: usize, seed: u64) -> Result<Estimate> {
    let depth = Depth::finite(delta)?;
    let bo = FieldKind::DeepGauss(Depth::Infinite);
    let fields = base_ensemble(bo, n, samples, &SeededRng::new(seed))?;
    let ld = log_densities(&fields, &WickContext::new(k, n, FieldKind::DeepGauss(depth))?, spec)?;
    let lg = log_densities(&fields, &WickContext::new(k, n, bo)?, spec)?;
    let lf: Vec<f64> = fields.iter().zip(&ld).map(|(u, l)| Ok(log_rn_deep(depth, u)? + l)).collect::<Result<_>>()?;
    scheffe_tv(&lf, &lg)
}

/// Energy distance between the mode `{1, 2}` marginals of `ρ̃_{δ,N}` and
/// `ρ_{KdV,N}`, with both ensembles built from the same Gaussians.
pub fn shallow_energy_distance(k: usize, n: usize, delta: f64, spec: &DensitySpec, samples: usize, seed: u64) -> Result<f64> {
    let rng = SeededRng::new(seed);
    let a = snis_sample(&WickContext::new(k, n, FieldKind::ScaledGauss(Depth::finite(delta)?))?, spec, samples, &rng)?;
    let b = snis_sample(&WickContext::new(k, n, FieldKind::KdVGauss)?, spec, samples, &rng)?;
    weak_marginal_distance(&a, &b, &[1, 2])
}

/// Coupled Ky-Fan distance between `X̃_δ` and `X_KdV` in `H^s`.
pub fn shallow_ky_fan(n: usize, delta: f64, s: f64, samples: usize, seed: u64) -> Result<Estimate> {
    let rng = SeededRng::new(seed);
    let x = base_ensemble(FieldKind::ScaledGauss(Depth::finite(delta)?), n, samples, &rng)?;
    let y = base_ensemble(FieldKind::KdVGauss, n, samples, &rng)?;
    ky_fan(&x, &y, s)
}

/// Monte-Carlo `E[G²]` for `G = exp(-R)` under the deep base measure.
pub fn density_second_moment(k: usize, n: usize, depth: Depth, samples: usize, seed: u64) -> Result<Estimate> {
    let ctx = WickContext::new(k, n, FieldKind::DeepGauss(depth))?;
    let fields = base_ensemble(ctx.kind, n, samples, &SeededRng::new(seed))?;
    let g2: Vec<f64> = log_densities(&fields, &ctx, &DensitySpec::Defocusing)?.iter().map(|l| (2.0 * l).exp()).collect();
    Ok(mean_se(&g2))
}

fn trajectory_rows(t: &mut Table, cfg: &ExperimentConfig, limit: Limit) -> Result<()> {
    let study = LimitStudy {
        limit,
        k: cfg.k,
        cutoff: cfg.cutoff,
        horizon: cfg.horizon,
        s: cfg.s,
        seed: cfg.seed,
        draws: cfg.draws,
    };
    let series = format!("k={} N={}", cfg.k, cfg.cutoff);
    for row in limit_study(&study, &cfg.deltas, &cfg.evolve_options())? {
        t.push(Row::estimate(&series, "delta", row.delta, "sup_gap", row.sup_gap));
        t.push(Row::exact(&series, "delta", row.delta, "initial_gap", row.initial_gap));
        t.push(Row::exact(&series, "delta", row.delta, "final_gap", row.final_gap));
    }
    Ok(())
}

/// Trajectory gaps to gBO, `TV(ρ_{δ,N}, ρ_{∞,N})`, the Gaussian KL and the
/// coupled `H^{-ε}` field gap over the depth grid.
pub fn deep_limit(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::default();
    trajectory_rows(&mut t, cfg, Limit::Deep)?;
    let series = format!("k={} N={}", cfg.k, cfg.cutoff);
    for &delta in &cfg.deltas {
        let tv = deep_gibbs_tv(cfg.k, cfg.cutoff, delta, &cfg.density_spec(), cfg.samples, cfg.seed)?;
        t.push(Row::estimate(&series, "delta", delta, "gibbs_tv", tv));
        t.push(Row::exact(&series, "delta", delta, "gaussian_kl", kl_deep(delta, cfg.nmax)?.value));
        let gap = deep_limit_gap(Depth::finite(delta)?, cfg.cutoff, cfg.samples, cfg.eps, &SeededRng::new(cfg.seed))?;
        t.push(Row::estimate(&series, "delta", delta, "field_gap", gap));
    }
    Ok(t)
}

/// Trajectory gaps to gKdV, and the weak distances between measures that
/// are mutually singular in the limit.
pub fn shallow_limit(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::default();
    trajectory_rows(&mut t, cfg, Limit::Shallow)?;
    let series = format!("k={} N={}", cfg.k, cfg.cutoff);
    for &delta in &cfg.deltas {
        let ed = shallow_energy_distance(cfg.k, cfg.cutoff, delta, &cfg.density_spec(), cfg.samples, cfg.seed)?;
        t.push(Row::exact(&series, "delta", delta, "energy_distance", ed));
        let kf = shallow_ky_fan(cfg.cutoff, delta, cfg.s, cfg.samples, cfg.seed)?;
        t.push(Row::estimate(&series, "delta", delta, "ky_fan", kf));
    }
    Ok(t)
}

/// Wick mass `∫W(u_N²)` as a field observable.
pub fn wick_mass(ctx: &WickContext) -> impl Fn(&SpectralField) -> f64 {
    let shift = 2.0 * PI * ctx.sigma.sigma;
    let n = ctx.cutoff;
    move |f: &SpectralField| f.project(n).l2_sq() - shift
}
