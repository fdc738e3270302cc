//! Conservation, reversibility and invariance of the truncated flow.

use ilw_core::dispersion::DepthParam;
use ilw_core::dynamics::*;
use ilw_core::field::{sample_field, SeededRng};
use ilw_core::gibbs::DensitySpec;

fn gilw(delta: f64) -> Family {
    Family::DeepGILW(DepthParam::Finite(delta))
}

fn fine(cfl: f64) -> EvolveOptions {
    EvolveOptions {
        dt: DtPolicy { mode: StepMode::Auto { cfl }, dt_max: 0.01, drift_tol: 1e-6, max_halvings: 4 },
        snapshots: 20,
        sobolev_s: -0.5,
    }
}

#[test]
fn conserved_quantities() {
    let spec = EvolutionSpec::new(gilw(2.0), 3, 16).unwrap();
    let u0 = sample_field(spec.family.field_kind().unwrap(), 24, &SeededRng::new(3)).unwrap();
    let rec = evolve(&u0, &spec, 2.0, &fine(0.1)).unwrap();
    assert!(rec.energy_drift() < 1e-8, "{}", rec.energy_drift());
    assert!(rec.l2_drift() < 1e-8);
    assert!(rec.diagnostics.iter().all(|d| d.mean == 0.0));
    for snap in &rec.snapshots {
        for (a, b) in snap.coeffs()[16..].iter().zip(&u0.coeffs()[16..]) {
            assert!((a.norm() - b.norm()).abs() <= 1e-14);
        }
    }
    assert!(rec.times.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn time_reversal() {
    for family in [gilw(2.0), Family::ScaledGILW(DepthParam::Shallow)] {
        let spec = EvolutionSpec::new(family, 3, 8).unwrap();
        let u0 = sample_field(family.field_kind().unwrap(), 8, &SeededRng::new(9)).unwrap();
        let fwd = evolve(&u0, &spec, 0.5, &fine(0.05)).unwrap();
        let back = evolve(fwd.final_field(), &spec, -0.5, &fine(0.05)).unwrap();
        let err = back.final_field().sub(&u0).l2_sq().sqrt();
        assert!(err < 1e-8, "{family}: {err}");
    }
}

#[test]
fn step_sizes_converge_at_fourth_order() {
    let spec = EvolutionSpec::new(gilw(2.0), 3, 8).unwrap();
    let u0 = sample_field(spec.family.field_kind().unwrap(), 8, &SeededRng::new(1)).unwrap();
    let run = |dt: f64| {
        let o = EvolveOptions { dt: DtPolicy { mode: StepMode::Fixed(dt), drift_tol: 1.0, ..Default::default() }, snapshots: 1, sobolev_s: 0.0 };
        evolve(&u0, &spec, 0.2, &o).unwrap().final_field().clone()
    };
    let reference = run(1e-5);
    let e1 = run(4e-4).sub(&reference).l2_sq().sqrt();
    let e2 = run(2e-4).sub(&reference).l2_sq().sqrt();
    let order = (e1 / e2).log2();
    assert!(order > 3.5 && order < 4.5, "observed order {order}");
}

#[test]
fn small_invariance_run() {
    let spec = EvolutionSpec::new(gilw(2.0), 3, 8).unwrap();
    let mut opts = fine(0.05);
    opts.snapshots = 1;
    let r = invariance_study(&spec, &DensitySpec::Defocusing, 1000, 0.5, &opts, &SeededRng::new(77)).unwrap();
    assert!(r.pass, "{r:#?}");
    assert!(r.max_l2_drift <= 1e-8, "{}", r.max_l2_drift);
    let zero = invariance_study(&spec, &DensitySpec::Defocusing, 1000, 0.0, &opts, &SeededRng::new(77)).unwrap();
    assert!(zero.observables.iter().all(|o| o.diff == 0.0));
}

#[test]
fn shallow_limit_gaps_shrink() {
    let st = LimitStudy { limit: Limit::Shallow, k: 3, cutoff: 8, horizon: 0.5, s: -0.5, seed: 5, draws: 4 };
    let rows = limit_study(&st, &[0.3, 0.1, 0.03], &EvolveOptions::default()).unwrap();
    assert!(rows.windows(2).all(|w| w[1].sup_gap.value < w[0].sup_gap.value), "{rows:?}");
}
