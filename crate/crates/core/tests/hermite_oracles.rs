//! Hermite polynomials against an independent series expansion of the
//! generating function `exp(tx - σt²/2)`.

use ilw_core::hermite::{hermite, hermite_shift_check};

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

#[test]
fn matches_generating_function() {
    for k in 0..=10 {
        for &x in &[-2.5, -0.3, 0.0, 0.7, 1.9, 3.2] {
            for &s in &[0.1, 0.5, 1.0, 2.7] {
                let h = hermite(k, x, s).unwrap();
                let g = generating_coefficient(k, x, s);
                assert!((h - g).abs() <= 1e-8 * (1.0 + g.abs()), "k={k} x={x} s={s}: {h} vs {g}");
            }
        }
    }
}

#[test]
fn scaling_identity() {
    for k in 0..=12 {
        for &x in &[-1.7_f64, 0.2, 2.4] {
            for &s in &[0.3_f64, 1.0, 4.0] {
                let lhs = hermite(k, x, s).unwrap();
                let rhs = s.powf(k as f64 / 2.0) * hermite(k, x / s.sqrt(), 1.0).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
            }
        }
    }
}

#[test]
fn shift_identity_grid() {
    for k in 0..=10 {
        for &(x, y) in &[(0.5_f64, -1.2_f64), (2.0, 0.3), (-1.1, -0.9)] {
            let (l, r) = hermite_shift_check(k, x, y, 0.8_f64).unwrap();
            assert!((l - r).abs() <= 1e-9 * (1.0 + l.abs()));
        }
    }
}
