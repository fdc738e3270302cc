//! Scalar abstraction shared by the deterministic symbol and polynomial code.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point types the symbol, Hermite and closed-form distance code
/// can run on. Implemented for `f32` and `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits the scalar type")
    }

    /// Lossy conversion from an integer frequency or count.
    fn of_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer fits the scalar type")
    }

    /// `ln(1 + x)` accurate for small `x`.
    fn ln1p(self) -> Self {
        Float::ln_1p(self)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `x - ln(1 + x)`, the excess form of `t - 1 - ln t` with `t = 1 + x`.
///
/// Uses a short series near zero where the direct difference cancels.
pub fn phi_excess<T: Scalar>(x: T) -> T {
    if x.abs() < T::lit(1e-3) {
        // x^2/2 - x^3/3 + x^4/4 - x^5/5
        let x2 = x * x;
        x2 * (T::lit(0.5) - x * (T::lit(1.0 / 3.0) - x * (T::lit(0.25) - x * T::lit(0.2))))
    } else {
        x - x.ln1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_excess_branches_agree() {
        for &x in &[-9.9e-4_f64, -1e-4, 1e-5, 5e-4, 9.99e-4] {
            let direct = x - x.ln_1p();
            let series = phi_excess(x);
            assert!((direct - series).abs() <= 1e-8 * series.abs(), "x={x}");
        }
        assert_eq!(phi_excess(0.0_f64), 0.0);
        assert!(phi_excess(1.0_f32) > 0.0);
    }
}
