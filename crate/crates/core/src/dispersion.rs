//! Dispersion symbols of the intermediate long wave family.
//!
//! For depth `δ > 0` the deep-water symbol is `K_δ(n) = n coth(δn) - 1/δ`,
//! tending to `|n|` as `δ → ∞`. The shallow-water scaling
//! `L_δ(n) = 3 K_δ(n) / δ` increases to `n²` as `δ → 0`.
//!
//! Everything is evaluated through the auxiliary function
//! `𝔥(x) = 1 + |x| - x coth(x)`, so that `K_δ(n) = |n| - 𝔥(δn)/δ` and
//! `q_δ(n) = |n| - K_δ(n) = 𝔥(δn)/δ`. Three branches keep `𝔥` accurate:
//! a Taylor series near the origin, an `expm1` form for moderate
//! arguments and an exponentially saturated form past [`H_FRAK_SATURATION`].

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Above this argument `𝔥` is evaluated through `e^{-2x}` only.
pub const H_FRAK_SATURATION: f64 = 20.0;

/// Below this argument the Langevin series `coth x - 1/x` is used.
const SERIES_CUTOFF: f64 = 0.25;

/// Taylor coefficients of `coth x - 1/x = Σ c_k x^{2k-1}`, `c_k = 4^k B_{2k} / (2k)!`.
const LANGEVIN_COEFFS: [f64; 10] = [
    1.0 / 3.0,
    -1.0 / 45.0,
    2.0 / 945.0,
    -1.0 / 4725.0,
    2.0 / 93555.0,
    -1382.0 / 638512875.0,
    4.0 / 18243225.0,
    -3617.0 / 162820783125.0,
    87734.0 / 38979295480125.0,
    -349222.0 / 1531329465290625.0,
];

/// Depth parameter selecting a member of the equation / measure family.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum DepthParam<T> {
    /// Finite depth `δ > 0`.
    Finite(T),
    /// Deep-water (Benjamin-Ono) limit `δ = ∞`.
    Infinite,
    /// Shallow-water limit `δ = 0`; meaningful for the scaled symbol only.
    Shallow,
}

impl<T: Scalar> DepthParam<T> {
    /// Validated finite depth.
    pub fn finite(delta: T) -> Result<Self> {
        if delta > T::zero() && delta.is_finite() {
            Ok(DepthParam::Finite(delta))
        } else {
            Err(Error::Domain(format!("depth must be positive and finite, got {delta:?}")))
        }
    }

    /// The finite depth value, or an error naming the operation.
    pub fn finite_value(self, op: &str) -> Result<T> {
        match self {
            DepthParam::Finite(d) if d > T::zero() && d.is_finite() => Ok(d),
            DepthParam::Finite(d) => Err(Error::Domain(format!("{op}: depth must be positive, got {d:?}"))),
            other => Err(Error::InvalidFamily(format!("{op} requires a finite depth, got {other:?}"))),
        }
    }
}

impl<T: Scalar> std::fmt::Display for DepthParam<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DepthParam::Finite(d) => write!(f, "{}", d.to_f64().unwrap_or(f64::NAN)),
            DepthParam::Infinite => write!(f, "inf"),
            DepthParam::Shallow => write!(f, "0"),
        }
    }
}

impl std::str::FromStr for DepthParam<f64> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinite" | "infinity" | "bo" => Ok(DepthParam::Infinite),
            "0" | "0.0" | "shallow" | "kdv" => Ok(DepthParam::Shallow),
            other => {
                let d: f64 = other
                    .parse()
                    .map_err(|_| Error::Domain(format!("cannot parse depth '{s}'")))?;
                DepthParam::finite(d)
            }
        }
    }
}

/// A symbol magnitude tagged with its frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValue<T> {
    pub value: T,
    pub frequency: i64,
}

fn langevin_series<T: Scalar>(x: T) -> T {
    let x2 = x * x;
    let mut acc = T::zero();
    for &c in LANGEVIN_COEFFS.iter().rev() {
        acc = acc * x2 + T::lit(c);
    }
    acc * x
}

/// `coth(x) - 1/x`, odd in `x`, zero at the origin.
pub fn coth_minus_inv<T: Scalar>(x: T) -> T {
    let ax = x.abs();
    let v = if ax < T::lit(SERIES_CUTOFF) {
        langevin_series(ax)
    } else {
        T::one() - h_frak(ax) / ax
    };
    if x < T::zero() {
        -v
    } else {
        v
    }
}

/// `𝔥(x) = 1 + |x| - x coth(x)` with `𝔥(0) = 0`; even, and `0 < 𝔥(x) < min(1, |x|)` for `x ≠ 0`.
pub fn h_frak<T: Scalar>(x: T) -> T {
    let x = x.abs();
    let two = T::lit(2.0);
    if x == T::zero() {
        T::zero()
    } else if x < T::lit(SERIES_CUTOFF) {
        x * (T::one() - langevin_series(x))
    } else if x <= T::lit(H_FRAK_SATURATION) {
        T::one() - two * x / (two * x).exp_m1()
    } else {
        h_frak_saturated(x)
    }
}

/// Large-argument form `1 - 2x e^{-2x} / (1 - e^{-2x})`; `e^{-2x}` underflows to zero gracefully.
pub fn h_frak_saturated<T: Scalar>(x: T) -> T {
    let x = x.abs();
    let two = T::lit(2.0);
    let e = (-two * x).exp();
    T::one() - two * x * e / (T::one() - e)
}

/// `K_δ(n) = n coth(δn) - 1/δ`, with `K_δ(0) = 0` and `K_∞(n) = |n|`.
pub fn k_delta<T: Scalar>(depth: DepthParam<T>, n: i64) -> Result<T> {
    let an = T::of_int(n.abs());
    match depth {
        DepthParam::Infinite => Ok(an),
        DepthParam::Shallow => Err(Error::InvalidFamily(
            "k_delta is undefined at the shallow limit; use l_delta".into(),
        )),
        DepthParam::Finite(_) => {
            let delta = depth.finite_value("k_delta")?;
            if n == 0 {
                return Ok(T::zero());
            }
            let x = delta * an;
            if x < T::lit(SERIES_CUTOFF) {
                Ok(an * langevin_series(x))
            } else {
                Ok(an - h_frak(x) / delta)
            }
        }
    }
}

/// `L_δ(n) = 3 K_δ(n) / δ`, and `L_0(n) = n²` at the shallow limit.
pub fn l_delta<T: Scalar>(depth: DepthParam<T>, n: i64) -> Result<T> {
    match depth {
        DepthParam::Shallow => {
            let an = T::of_int(n.abs());
            Ok(an * an)
        }
        DepthParam::Infinite => Err(Error::InvalidFamily(
            "l_delta is undefined in the deep-water limit".into(),
        )),
        DepthParam::Finite(_) => {
            let delta = depth.finite_value("l_delta")?;
            if n == 0 {
                return Ok(T::zero());
            }
            let an = T::of_int(n.abs());
            let x = delta * an;
            // 3 K / δ = 3 n² (coth x - 1/x) / x
            if x < T::lit(SERIES_CUTOFF) {
                Ok(T::lit(3.0) * an * an * langevin_series(x) / x)
            } else {
                Ok(T::lit(3.0) * k_delta(depth, n)? / delta)
            }
        }
    }
}

/// `q_δ(n) = |n| - K_δ(n) = 𝔥(δn)/δ`, bounded by `1/δ`.
pub fn q_delta<T: Scalar>(depth: DepthParam<T>, n: i64) -> Result<T> {
    let delta = depth.finite_value("q_delta")?;
    Ok(h_frak(delta * T::of_int(n)) / delta)
}

/// `h(n, δ) = 1 - L_δ(n) / n²` for `n ≠ 0`, a number in `(0, 1)`.
pub fn h_shallow<T: Scalar>(depth: DepthParam<T>, n: i64) -> Result<T> {
    let delta = depth.finite_value("h_shallow")?;
    if n == 0 {
        return Err(Error::Domain("h_shallow is undefined at n = 0".into()));
    }
    let x = delta * T::of_int(n.abs());
    if x < T::lit(SERIES_CUTOFF) {
        // 1 - 3 (coth x - 1/x)/x = x²/15 - 2x⁴/315 + ...; drop the leading 1/3.
        let x2 = x * x;
        let mut acc = T::zero();
        for &c in LANGEVIN_COEFFS[1..].iter().rev() {
            acc = acc * x2 + T::lit(c);
        }
        Ok(-T::lit(3.0) * acc * x2)
    } else {
        let an = T::of_int(n.abs());
        Ok(T::one() - l_delta(depth, n)? / (an * an))
    }
}

/// Partial sum `6 n² Σ_{k ≤ terms} 1 / (k²π² + δ²n²)` of the Mittag-Leffler expansion of `L_δ(n)`.
///
/// Summed from the smallest term upwards. The neglected tail is below `6n² / (π² terms)`.
pub fn mittag_leffler_l<T: Scalar>(delta: T, n: i64, terms: u64) -> T {
    if n == 0 || terms == 0 {
        return T::zero();
    }
    let pi2 = T::PI() * T::PI();
    let dn = delta * T::of_int(n);
    let dn2 = dn * dn;
    let mut acc = T::zero();
    for k in (1..=terms).rev() {
        let kk = T::of_int(k as i64);
        acc = acc + T::one() / (kk * kk * pi2 + dn2);
    }
    let an = T::of_int(n);
    T::lit(6.0) * an * an * acc
}

/// Analytic bound on the tail dropped by [`mittag_leffler_l`].
pub fn mittag_leffler_tail_bound<T: Scalar>(n: i64, terms: u64) -> T {
    let an = T::of_int(n);
    T::lit(6.0) * an * an / (T::PI() * T::PI() * T::of_int(terms as i64))
}

/// Partial sum of the direct series `h(n,δ) = 6δ² Σ_k n² / (k²π²(k²π² + δ²n²))`.
pub fn h_shallow_series<T: Scalar>(delta: T, n: i64, terms: u64) -> T {
    let pi2 = T::PI() * T::PI();
    let an = T::of_int(n);
    let dn2 = delta * delta * an * an;
    let mut acc = T::zero();
    for k in (1..=terms).rev() {
        let kk = T::of_int(k as i64);
        let kp = kk * kk * pi2;
        acc = acc + an * an / (kp * (kp + dn2));
    }
    T::lit(6.0) * delta * delta * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    type D = DepthParam<f64>;

    #[test]
    fn deep_limit_symbol_is_abs() {
        assert_eq!(k_delta(D::Infinite, 5).unwrap(), 5.0);
        assert_eq!(k_delta(D::Infinite, -7).unwrap(), 7.0);
    }

    #[test]
    fn k_delta_values() {
        assert_eq!(k_delta(D::Finite(1.0), 0).unwrap(), 0.0);
        let coth1 = 1.0_f64.cosh() / 1.0_f64.sinh();
        let k = k_delta(D::Finite(1.0), 1).unwrap();
        assert!((k - (coth1 - 1.0)).abs() < 1e-15);
        assert!((k - 0.313_035_285_499_331_3).abs() < 1e-15);
        assert!(matches!(k_delta(D::Shallow, 1), Err(Error::InvalidFamily(_))));
        assert!(matches!(k_delta(D::Finite(-1.0), 1), Err(Error::Domain(_))));
    }

    #[test]
    fn l_delta_values() {
        assert_eq!(l_delta(D::Shallow, 3).unwrap(), 9.0);
        assert!(matches!(l_delta(D::Infinite, 3), Err(Error::InvalidFamily(_))));
        for n in 1..=8 {
            let mut prev = 0.0;
            for &d in &[1.0, 0.1, 0.01, 0.001] {
                let l = l_delta(D::Finite(d), n).unwrap();
                assert!(l > prev, "n={n} d={d}");
                assert!(l < (n * n) as f64);
                prev = l;
            }
        }
    }

    #[test]
    fn l_delta_branches_meet() {
        // series branch (x < 0.25) against the 𝔥 branch just across the cutoff
        for n in 1..=4_i64 {
            let d = 0.25 / n as f64;
            let lo = l_delta(D::Finite(d * (1.0 - 1e-12)), n).unwrap();
            let hi = l_delta(D::Finite(d * (1.0 + 1e-12)), n).unwrap();
            assert!((lo - hi).abs() <= 1e-13 * hi, "{lo} {hi}");
        }
    }

    #[test]
    fn q_delta_values() {
        let q = q_delta(D::Finite(1.0), 1).unwrap();
        assert!((q - 0.686_964_714_500_668_7).abs() < 1e-15);
        assert_eq!(q_delta(D::Finite(1.0), 0).unwrap(), 0.0);
        for n in -10_000..=10_000 {
            assert!(q_delta(D::Finite(2.0), n).unwrap() <= 0.5);
        }
        assert!(q_delta(D::Infinite, 1).is_err());
    }

    #[test]
    fn h_frak_branches() {
        assert_eq!(h_frak(0.0_f64), 0.0);
        let v = h_frak(100.0_f64);
        assert!(v.is_finite() && (v - 1.0).abs() < 1e-15);
        for &x in &[0.1_f64, 1.0, 10.0] {
            assert_eq!(h_frak(x), h_frak(-x));
        }
        // crossover agreement around the saturation threshold
        for &x in &[19.0_f64, 19.5, 20.0, 20.5, 21.0] {
            let a = 1.0 - 2.0 * x / (2.0 * x).exp_m1();
            let b = h_frak_saturated(x);
            assert!((a - b).abs() < 1e-15, "x={x}");
        }
        // series vs expm1 at the small cutoff
        for &x in &[0.2_f64, 0.25, 0.3] {
            let a = 1.0 - 2.0 * x / (2.0 * x).exp_m1();
            let b = x * (1.0 - langevin_series(x));
            assert!((a - b).abs() < 1e-15, "x={x}");
        }
        assert_eq!(h_frak_saturated(1e6_f64), 1.0);
    }

    #[test]
    fn h_frak_bounds() {
        for i in 1..2000 {
            let x = i as f64 * 0.01;
            let h = h_frak(x);
            assert!(h > 0.0 && h < x.min(1.0), "x={x} h={h}");
        }
    }

    #[test]
    fn h_shallow_values() {
        assert!(h_shallow(D::Finite(1.0), 0).is_err());
        let h = h_shallow(D::Finite(1.0), 10_000).unwrap();
        assert!((1.0 - h) < 5e-4 && h < 1.0);
        for n in 1..=8 {
            let mut prev = f64::INFINITY;
            for &d in &[1.0, 0.1, 0.01, 0.001] {
                let h = h_shallow(D::Finite(d), n).unwrap();
                assert!(h < prev && h > 0.0);
                prev = h;
            }
            assert!(prev < 1e-5);
        }
    }

    #[test]
    fn h_shallow_matches_series() {
        for &d in &[0.01, 0.1, 1.0, 3.0] {
            for n in 1..=8 {
                let closed = h_shallow(D::Finite(d), n).unwrap();
                // tail of the series is below 6δ²n²/(3π⁴ terms³)
                let series = h_shallow_series(d, n, 200_000);
                assert!((closed - series).abs() < 1e-10, "d={d} n={n}: {closed} vs {series}");
            }
        }
    }

    #[test]
    fn kakutani_partial_sums_of_h_diverge() {
        let partial = |m: i64| -> f64 {
            (1..=m).map(|n| 2.0 * h_shallow(D::Finite(1.0), n).unwrap().powi(2)).sum()
        };
        for &m in &[100_i64, 400, 1000] {
            assert!(partial(2 * m) >= 1.5 * partial(m));
        }
    }

    #[test]
    fn mittag_leffler_oracle() {
        assert_eq!(mittag_leffler_l(1.0_f64, 0, 10), 0.0);
        let a = mittag_leffler_l(1.0_f64, 3, 100);
        let b = mittag_leffler_l(1.0_f64, 3, 10_000);
        let c = mittag_leffler_l(1.0_f64, 3, 1_000_000);
        assert!(a < b && b < c);
        let l = l_delta(D::Finite(1.0), 3).unwrap();
        assert!(l - c > 0.0 && l - c <= mittag_leffler_tail_bound::<f64>(3, 1_000_000));
    }

    #[test]
    fn generic_over_f32() {
        let k = k_delta(DepthParam::Finite(1.0_f32), 1).unwrap();
        assert!((k - 0.313_035_3).abs() < 1e-6);
        let l = l_delta(DepthParam::<f32>::Shallow, 4).unwrap();
        assert_eq!(l, 16.0);
    }

    #[test]
    fn parse_depth() {
        assert_eq!("inf".parse::<D>().unwrap(), D::Infinite);
        assert_eq!("0".parse::<D>().unwrap(), D::Shallow);
        assert_eq!("2.5".parse::<D>().unwrap(), D::Finite(2.5));
        assert!("-1".parse::<D>().is_err());
    }
}
