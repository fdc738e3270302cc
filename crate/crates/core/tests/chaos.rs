//! Wiener-chaos properties of Wick powers of the Gaussian fields, checked by
//! Monte Carlo against closed-form covariances.

use ilw_core::field::{FieldKind, GaussianSource, SeededRng, SpectralField};
use ilw_core::gibbs::{chaos_prefactor, chaos_second_moment, chaos_second_moment_mc, field_covariance, potential_r, WickContext};
use ilw_core::hermite::hermite;
use ilw_core::stats::mean_se;
use ilw_core::Depth;

fn deep2() -> FieldKind {
    FieldKind::DeepGauss(Depth::Finite(2.0))
}

#[test]
fn orthogonality_of_chaoses() {
    let n = 8;
    let ctx = WickContext::new(1, n, deep2()).unwrap();
    let s = ctx.sigma.sigma;
    let (x, y) = (0.0, 2.0 * std::f64::consts::PI * 3.0 / 16.0);
    let gamma = field_covariance(deep2(), n, x - y).unwrap();
    let rng = SeededRng::new(21);
    let samples = 20_000;
    let pts: Vec<(f64, f64)> = (0..samples as u64)
        .map(|i| {
            let u = SpectralField::from_gaussians(deep2(), &rng.member(i).draw(n)).unwrap();
            (u.eval(x), u.eval(y))
        })
        .collect();
    for k in 1..=3 {
        for m in 1..=3 {
            let prod: Vec<f64> = pts.iter().map(|&(a, b)| hermite(k, a, s).unwrap() * hermite(m, b, s).unwrap()).collect();
            let e = mean_se(&prod);
            let fact: f64 = (1..=k).map(|j| j as f64).product();
            let expect = if k == m { fact * gamma.powi(k as i32) } else { 0.0 };
            assert!((e.value - expect).abs() <= 5.0 * e.stderr, "k={k} m={m}: {e} vs {expect}");
        }
    }
}

#[test]
fn prefactor_confirmed_by_monte_carlo() {
    let ctx = WickContext::new(2, 4, deep2()).unwrap();
    let exact = chaos_second_moment(&ctx, 1).unwrap();
    let mc = chaos_second_moment_mc(&ctx, 1, 40_000, &SeededRng::new(4)).unwrap();
    assert!((mc.value - exact).abs() <= 5.0 * mc.stderr, "{mc} vs {exact}");
    assert!((chaos_prefactor(2) - 2.0).abs() < 1e-15);
}

#[test]
fn convolution_oracle_for_bo_field() {
    let ctx = WickContext::new(2, 8, FieldKind::DeepGauss(Depth::Infinite)).unwrap();
    let exact = chaos_second_moment(&ctx, 1).unwrap();
    let mc = chaos_second_moment_mc(&ctx, 1, 40_000, &SeededRng::new(8)).unwrap();
    assert!((mc.value - exact).abs() <= 5.0 * mc.stderr, "{mc} vs {exact}");
}

#[test]
fn wick_potential_has_zero_mean() {
    let ctx = WickContext::new(3, 8, deep2()).unwrap();
    let rng = SeededRng::new(13);
    let r: Vec<f64> = (0..20_000u64)
        .map(|i| {
            let u = SpectralField::from_gaussians(deep2(), &rng.member(i).draw(8)).unwrap();
            potential_r(&u, &ctx).unwrap()
        })
        .collect();
    let e = mean_se(&r);
    assert!(e.value.abs() <= 5.0 * e.stderr, "{e}");
}
