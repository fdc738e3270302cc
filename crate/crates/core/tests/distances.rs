//! Closed-form and Monte-Carlo distances between Gaussian and Gibbs measures.

use std::f64::consts::PI;

use ilw_core::dispersion::DepthParam;
use ilw_core::field::{FieldKind, SeededRng, SpectralField};
use ilw_core::gibbs::{base_ensemble, snis_sample, DensitySpec, WickContext};
use ilw_core::metrics::*;
use ilw_core::Depth;

fn gauss(x: f64, v: f64) -> f64 {
    (-x * x / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
}

#[test]
fn single_mode_affinity_by_quadrature() {
    let (a, b) = (1.0, 2.0);
    let (lo, hi, n) = (-40.0, 40.0, 200_000);
    let h = (hi - lo) / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let x = lo + i as f64 * h;
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * (gauss(x, a) * gauss(x, b)).sqrt();
    }
    let quad = acc * h / 3.0;
    assert!((hellinger_mode_factor(a, b) - quad).abs() < 1e-10);
}

#[test]
fn deep_measures_remain_equivalent() {
    let h = |m: usize| {
        hellinger_product(
            &ProductGaussianSpec::<f64>::deep(DepthParam::Finite(2.0), m).unwrap(),
            &ProductGaussianSpec::<f64>::deep(DepthParam::Infinite, m).unwrap(),
        )
        .unwrap()
    };
    let (h2, h3, h4) = (h(100), h(1000), h(10_000));
    assert!(h2 >= h3 && h3 >= h4);
    assert!(h4 > 0.5 && h3 - h4 < 1e-3);
}

#[test]
fn kl_monotone_in_depth_and_modes() {
    let mut prev = f64::INFINITY;
    for j in 1..=10 {
        let d = 2f64.powi(j);
        let v = kl_deep(d, 10_000).unwrap().value;
        assert!(v < prev, "delta={d}");
        prev = v;
    }
    let mut prev = 0.0;
    for &m in &[1usize, 10, 100, 1000] {
        let v = kl_deep(2.0_f64, m).unwrap().value;
        assert!(v >= prev);
        prev = v;
    }
    assert_eq!(ilw_core::scalar::phi_excess(0.0_f64), 0.0);
}

#[test]
fn kakutani_dichotomy() {
    let a = ProductGaussianSpec::<f64>::deep(DepthParam::Finite(2.0), 100_000).unwrap();
    let b = ProductGaussianSpec::<f64>::deep(DepthParam::Infinite, 100_000).unwrap();
    let s4 = kakutani_sum(&a, &b, 10_000).unwrap();
    let s5 = kakutani_sum(&a, &b, 100_000).unwrap();
    assert!(s5 - s4 <= 1e-3 * s4 + 1e-6);

    let a = ProductGaussianSpec::<f64>::scaled(DepthParam::Finite(1.0), 2000).unwrap();
    let b = ProductGaussianSpec::<f64>::scaled(DepthParam::Shallow, 2000).unwrap();
    let sums = kakutani_partial_sums(&a, &b).unwrap();
    for &m in &[100usize, 1000] {
        assert!(sums[2 * m - 1] >= 1.5 * sums[m - 1]);
    }
}

#[test]
fn le_cam_ordering_for_a_few_modes() {
    let modes = 4;
    let depth = Depth::Finite(2.0);
    let base = base_ensemble(FieldKind::DeepGauss(Depth::Infinite), modes, 100_000, &SeededRng::new(12)).unwrap();
    let lf: Vec<f64> = base.iter().map(|u| log_rn_deep(depth, u).unwrap()).collect();
    let lg = vec![0.0; lf.len()];
    let tv = scheffe_tv(&lf, &lg).unwrap();
    let dh = hellinger_distance(
        &ProductGaussianSpec::<f64>::deep(depth, modes).unwrap(),
        &ProductGaussianSpec::<f64>::deep(DepthParam::Infinite, modes).unwrap(),
    )
    .unwrap();
    assert!(dh * dh <= tv.value + 3.0 * tv.stderr, "{dh} {tv}");
    assert!(tv.value - 3.0 * tv.stderr <= 2f64.sqrt() * dh, "{dh} {tv}");
}

#[test]
fn ky_fan_decreases_with_depth() {
    let n = 64;
    let rng = SeededRng::new(40);
    let bo = base_ensemble(FieldKind::DeepGauss(Depth::Infinite), n, 2000, &rng).unwrap();
    let mut prev = f64::INFINITY;
    for &d in &[2.0, 8.0, 32.0, 128.0] {
        let x = base_ensemble(FieldKind::DeepGauss(Depth::Finite(d)), n, 2000, &rng).unwrap();
        let kf = ky_fan(&x, &bo, -0.5).unwrap();
        assert!(kf.value < prev && kf.value <= 1.0);
        prev = kf.value;
    }
}

#[test]
fn energy_distance_of_identical_ensembles_is_zero() {
    let ctx = WickContext::new(3, 8, FieldKind::DeepGauss(Depth::Finite(2.0))).unwrap();
    let e = snis_sample(&ctx, &DensitySpec::Defocusing, 500, &SeededRng::new(2)).unwrap();
    assert_eq!(weak_marginal_distance(&e, &e, &[1, 2]).unwrap(), 0.0);
    let other = snis_sample(&ctx, &DensitySpec::Unit, 500, &SeededRng::new(3)).unwrap();
    assert!(weak_marginal_distance(&e, &other, &[1, 2]).unwrap() > 0.0);
    assert!(weak_marginal_distance(&e, &other, &[1, 2, 3, 4, 5]).is_err());
}

#[test]
fn rn_derivative_has_unit_mean() {
    let depth = Depth::Finite(2.0);
    let base = base_ensemble(FieldKind::DeepGauss(Depth::Infinite), 4, 50_000, &SeededRng::new(6)).unwrap();
    let rn: Vec<f64> = base.iter().map(|u: &SpectralField| log_rn_deep(depth, u).unwrap().exp()).collect();
    let e = ilw_core::stats::mean_se(&rn);
    assert!((e.value - 1.0).abs() <= 5.0 * e.stderr, "{e}");
}
