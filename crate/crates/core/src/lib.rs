//! Spectral laboratory for the intermediate long wave (ILW) family.
//!
//! The crate covers the dispersion symbols `K_δ`, `L_δ`, Hermite polynomials
//! and Wick constants, Gaussian random Fourier series, Wick-renormalized
//! Gibbs densities with importance and Metropolis samplers, distances between
//! Gaussian and Gibbs measures, and the frequency-truncated dynamics in the
//! deep-water (Benjamin-Ono) and shallow-water (KdV) regimes.
//!
//! Deterministic code (symbols, Hermite polynomials, closed-form distances) is
//! generic over [`Scalar`]; sampling and time stepping run in `f64`.

pub mod dispersion;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod gibbs;
pub mod hermite;
pub mod metrics;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Depth parameter in double precision.
pub type Depth = dispersion::DepthParam<f64>;
/// Wick variance in double precision.
pub type WickVar = hermite::WickVariance<f64>;

/// Version of this library, echoed in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
