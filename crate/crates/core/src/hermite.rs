//! Hermite polynomials with variance parameter and the Wick variance constants.
//!
//! `H_k(x; σ)` is generated by `e^{tx - σt²/2} = Σ t^k/k! H_k(x; σ)` and is
//! evaluated by the upward recursion `H_k = x H_{k-1} - (k-1) σ H_{k-2}`.
//!
//! Variance constants follow the Fourier convention `f = (1/2π) Σ f̂(n) e^{inx}`
//! with Gaussians of variance `2π`, which gives
//! `σ_{δ,N} = E[X_{δ,N}(x)²] = (1/π) Σ_{n=1}^{N} 1/K_δ(n)`.

use crate::dispersion::{k_delta, DepthParam};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest supported Hermite degree.
pub const HERMITE_DEGREE_CAP: usize = 64;

/// `H_k(x; σ)`. Degrees above [`HERMITE_DEGREE_CAP`] are rejected.
pub fn hermite<T: Scalar>(k: usize, x: T, sigma: T) -> Result<T> {
    if k > HERMITE_DEGREE_CAP {
        return Err(Error::DegreeLimit { degree: k, cap: HERMITE_DEGREE_CAP });
    }
    Ok(hermite_unchecked(k, x, sigma))
}

/// Recursion without the degree check, for hot loops whose degree is validated upstream.
#[inline]
pub fn hermite_unchecked<T: Scalar>(k: usize, x: T, sigma: T) -> T {
    match k {
        0 => T::one(),
        1 => x,
        _ => {
            let mut prev = T::one();
            let mut cur = x;
            for j in 2..=k {
                let next = x * cur - T::of_int(j as i64 - 1) * sigma * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `(H_k(x+y; σ), Σ_ℓ C(k,ℓ) x^{k-ℓ} H_ℓ(y; σ))`; the two agree identically.
pub fn hermite_shift_check<T: Scalar>(k: usize, x: T, y: T, sigma: T) -> Result<(T, T)> {
    let lhs = hermite(k, x + y, sigma)?;
    let mut rhs = T::zero();
    let mut binom = T::one();
    for l in 0..=k {
        if l > 0 {
            binom = binom * T::of_int((k - l + 1) as i64) / T::of_int(l as i64);
        }
        rhs = rhs + binom * x.powi((k - l) as i32) * hermite_unchecked(l, y, sigma);
    }
    Ok((lhs, rhs))
}

/// `a_k = -min_x H_k(x; 1)` for even `k ≥ 2`, so that `H_k(x; σ) ≥ -a_k σ^{k/2}`.
///
/// Located by a dense scan followed by Newton iterations on `H_k' = k H_{k-1}`.
pub fn hermite_floor(k: usize) -> Result<f64> {
    if k == 0 || k % 2 == 1 || k > HERMITE_DEGREE_CAP {
        return Err(Error::Domain(format!("hermite_floor needs an even degree in 2..={HERMITE_DEGREE_CAP}, got {k}")));
    }
    // all zeros of H_k lie inside |x| < sqrt(4k + 2)
    let r = (4.0 * k as f64 + 2.0).sqrt();
    let steps = 20_000;
    let mut best_x = 0.0;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let x = -r + 2.0 * r * i as f64 / steps as f64;
        let v = hermite_unchecked(k, x, 1.0);
        if v < best {
            best = v;
            best_x = x;
        }
    }
    let mut x = best_x;
    for _ in 0..50 {
        let d1 = k as f64 * hermite_unchecked(k - 1, x, 1.0);
        let d2 = (k * (k - 1)) as f64 * hermite_unchecked(k - 2, x, 1.0);
        if d2 <= 0.0 {
            break;
        }
        let dx = d1 / d2;
        x -= dx;
        if dx.abs() < 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    Ok(-hermite_unchecked(k, x, 1.0).min(best))
}

/// Which Gaussian family a Wick variance belongs to.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum WickProvenance<T> {
    /// `σ_{δ,N}` for `X_δ` (or `X_BO` when the depth is infinite).
    Deep { depth: DepthParam<T>, cutoff: usize },
    /// `σ̃_{δ,N} = (δ/3) σ_{δ,N}` for the scaled field `X̃_δ`.
    Shallow { depth: DepthParam<T>, cutoff: usize },
    /// `σ_{KdV,N} = (1/π) Σ_{n ≤ N} 1/n²`.
    KdVTruncated { cutoff: usize },
    /// `σ_KdV = π/6`.
    KdVLimit,
}

/// Pointwise variance used to Wick-order powers of a truncated field.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WickVariance<T> {
    pub sigma: T,
    pub provenance: WickProvenance<T>,
}

/// Neumaier-compensated sum of `f(n)` for `n = N, N-1, ..., 1`.
fn compensated_sum<T: Scalar>(cutoff: usize, mut f: impl FnMut(i64) -> Result<T>) -> Result<T> {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for n in (1..=cutoff as i64).rev() {
        let v = f(n)?;
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    Ok(sum + comp)
}

fn require_cutoff(cutoff: usize) -> Result<()> {
    if cutoff == 0 {
        Err(Error::Domain("cutoff N must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `σ_{δ,N} = (1/π) Σ_{n=1}^{N} 1/K_δ(n)`; `σ_{∞,N} = (1/π) Σ 1/n`.
pub fn sigma_deep<T: Scalar>(depth: DepthParam<T>, cutoff: usize) -> Result<WickVariance<T>> {
    require_cutoff(cutoff)?;
    if matches!(depth, DepthParam::Shallow) {
        return Err(Error::InvalidFamily("sigma_deep needs a finite or infinite depth".into()));
    }
    let s = compensated_sum(cutoff, |n| Ok(T::one() / k_delta(depth, n)?))?;
    Ok(WickVariance { sigma: s / T::PI(), provenance: WickProvenance::Deep { depth, cutoff } })
}

/// `σ̃_{δ,N} = (δ/3) σ_{δ,N}`.
pub fn sigma_shallow<T: Scalar>(depth: DepthParam<T>, cutoff: usize) -> Result<WickVariance<T>> {
    let delta = depth.finite_value("sigma_shallow")?;
    let deep = sigma_deep(depth, cutoff)?;
    Ok(WickVariance {
        sigma: delta / T::lit(3.0) * deep.sigma,
        provenance: WickProvenance::Shallow { depth, cutoff },
    })
}

/// `σ_{KdV,N} = (1/π) Σ_{n=1}^{N} 1/n²`.
pub fn sigma_kdv<T: Scalar>(cutoff: usize) -> Result<WickVariance<T>> {
    require_cutoff(cutoff)?;
    let s = compensated_sum(cutoff, |n| {
        let nn = T::of_int(n);
        Ok(T::one() / (nn * nn))
    })?;
    Ok(WickVariance { sigma: s / T::PI(), provenance: WickProvenance::KdVTruncated { cutoff } })
}

/// `σ_KdV = π/6`.
pub fn sigma_kdv_limit<T: Scalar>() -> WickVariance<T> {
    WickVariance { sigma: T::PI() / T::lit(6.0), provenance: WickProvenance::KdVLimit }
}
