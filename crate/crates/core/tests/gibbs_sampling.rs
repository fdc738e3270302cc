//! Importance and Metropolis sampling of the truncated Gibbs measures.

use std::f64::consts::PI;

use ilw_core::field::{FieldKind, SeededRng, SpectralField};
use ilw_core::gibbs::{
    base_ensemble, chi_cutoff, log_densities, mh_sample, snis_sample, tamed_constant, DensitySpec, MhOptions,
    SamplerInfo, WickContext, WickEvaluator,
};
use ilw_core::hermite::hermite_floor;
use ilw_core::Depth;

fn deep2() -> FieldKind {
    FieldKind::DeepGauss(Depth::Finite(2.0))
}

fn wick_mass(ctx: &WickContext) -> impl Fn(&SpectralField) -> f64 {
    let shift = 2.0 * PI * ctx.sigma.sigma;
    let n = ctx.cutoff;
    move |f: &SpectralField| f.project(n).l2_sq() - shift
}

#[test]
fn cutoff_measure_samplers_agree() {
    let ctx = WickContext::new(2, 16, deep2()).unwrap();
    let spec = DensitySpec::CutoffCubic { k_cut: 1.0 };
    let snis = snis_sample(&ctx, &spec, 400_000, &SeededRng::new(31)).unwrap();
    let mh = mh_sample(&ctx, &spec, &MhOptions::new(400_000, 0.5), &SeededRng::new(32)).unwrap();
    let obs = wick_mass(&ctx);
    let a = snis.expect(&obs);
    let b = mh.expect(&obs);
    assert!(a.agrees_with(&b, 3.0), "snis {a} vs mh {b}");
    for (f, w) in snis.fields.iter().zip(&snis.weights) {
        if *w > 0.0 {
            let m = obs(f);
            assert!(m.abs() < 2.0);
            assert!(f.l2_sq() <= 2.0 * PI * ctx.sigma.sigma + 2.0);
        }
    }
}

#[test]
fn tamed_density_dominates_cutoff_density() {
    let ctx = WickContext::new(2, 16, deep2()).unwrap();
    let (k_cut, a) = (1.0, 0.5);
    let fields = base_ensemble(ctx.kind, 16, 5000, &SeededRng::new(3)).unwrap();
    let g = log_densities(&fields, &ctx, &DensitySpec::CutoffCubic { k_cut }).unwrap();
    let t = log_densities(&fields, &ctx, &DensitySpec::TamedCubic { a }).unwrap();
    let c = tamed_constant(a, k_cut).ln();
    for (x, y) in g.iter().zip(&t) {
        assert!(*x <= c + y + 1e-12);
    }
    assert_eq!(chi_cutoff(0.0, k_cut), 1.0);
}

#[test]
fn defocusing_density_ceiling() {
    let ctx = WickContext::new(3, 32, deep2()).unwrap();
    let ceiling = 2.0 * PI / 4.0 * ctx.sigma.sigma.powi(2) * hermite_floor(4).unwrap();
    let fields = base_ensemble(ctx.kind, 32, 5000, &SeededRng::new(5)).unwrap();
    let ld = log_densities(&fields, &ctx, &DensitySpec::Defocusing).unwrap();
    assert!(ld.iter().all(|&l| l <= ceiling));
}

#[test]
fn partition_function_estimates() {
    // Jensen: Z = E[e^{-R}] ≥ e^{-E R} = 1 since Wick powers have mean zero.
    for &n in &[8usize, 16, 32, 64] {
        let ctx = WickContext::new(3, n, deep2()).unwrap();
        let e = snis_sample(&ctx, &DensitySpec::Defocusing, 20_000, &SeededRng::new(17)).unwrap();
        let SamplerInfo::Snis { z, log_z } = e.sampler else { unreachable!() };
        assert!(z.value > 1.0, "N={n}: {z}");
        assert!((z.value.ln() - log_z).abs() < 1e-9);
        assert!(e.ess >= 1.0 && e.ess <= 20_000.0);
    }
}

#[test]
fn unit_chain_is_base_gaussian() {
    let ctx = WickContext::new(3, 4, deep2()).unwrap();
    let e = mh_sample(&ctx, &DensitySpec::Unit, &MhOptions::new(40_000, 0.5), &SeededRng::new(9)).unwrap();
    for n in 1..=4usize {
        let v = e.expect(|f| f.coeffs()[n - 1].norm_sqr());
        let expect = 2.0 * PI / ctx.kind.symbol(n as i64).unwrap();
        assert!((v.value - expect).abs() <= 5.0 * v.stderr, "n={n}: {v} vs {expect}");
    }
}

#[test]
fn evaluator_reuse_matches_fresh() {
    let ctx = WickContext::new(3, 8, deep2()).unwrap();
    let fields = base_ensemble(ctx.kind, 12, 5, &SeededRng::new(1)).unwrap();
    let mut ev = WickEvaluator::new(ctx);
    for f in &fields {
        ev.load(f).unwrap();
        let fresh = ilw_core::gibbs::potential_r(f, &ctx).unwrap();
        assert_eq!(ev.potential(), fresh);
    }
}
