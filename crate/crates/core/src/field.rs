//! Mean-zero real periodic fields stored as Fourier coefficients, and the
//! Gaussian random Fourier series `X_δ`, `X_BO`, `X̃_δ`, `X_KdV`.
//!
//! Conventions: `f̂(n) = ∫_𝕋 f(x) e^{-inx} dx` and
//! `f(x) = (1/2π) Σ_{n≠0} f̂(n) e^{inx}`. Only `n = 1..=N` is stored; negative
//! frequencies are implied by `f̂(-n) = conj f̂(n)` and `f̂(0) = 0`.
//! A field of kind with symbol `S(n)` has `f̂(n) = g_n / sqrt(S(n))` where
//! `g_n` is complex Gaussian with `E|g_n|² = 2π` (variance `π` in each of the
//! real and imaginary parts).

use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};

use crate::dispersion::{k_delta, l_delta, DepthParam};
use crate::error::{Error, Result};
use crate::hermite::{sigma_deep, sigma_kdv, sigma_shallow, WickVariance};
use crate::stats::{mean_se, Estimate};

pub type Depth = DepthParam<f64>;

/// Which Gaussian base measure a field is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum FieldKind {
    /// `X_δ` with per-mode variance `2π / K_δ(n)`; `X_BO` when the depth is infinite.
    DeepGauss(Depth),
    /// `X̃_δ` with variance `2π / L_δ(n)`, finite depth only.
    ScaledGauss(Depth),
    /// `X_KdV` (mean-zero Brownian loop) with variance `2π / n²`.
    KdVGauss,
}

impl FieldKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FieldKind::DeepGauss(DepthParam::Shallow) => {
                Err(Error::InvalidFamily("DeepGauss needs a finite or infinite depth".into()))
            }
            FieldKind::DeepGauss(d) => {
                if let DepthParam::Finite(_) = d {
                    d.finite_value("DeepGauss")?;
                }
                Ok(())
            }
            FieldKind::ScaledGauss(d) => d.finite_value("ScaledGauss").map(|_| ()),
            FieldKind::KdVGauss => Ok(()),
        }
    }

    /// Symbol `S(n)` whose inverse scales the per-mode variance.
    pub fn symbol(&self, n: i64) -> Result<f64> {
        match *self {
            FieldKind::DeepGauss(DepthParam::Shallow) => {
                Err(Error::InvalidFamily("DeepGauss needs a finite or infinite depth".into()))
            }
            FieldKind::DeepGauss(d) => k_delta(d, n),
            FieldKind::ScaledGauss(d) => {
                d.finite_value("ScaledGauss")?;
                l_delta(d, n)
            }
            FieldKind::KdVGauss => Ok((n * n) as f64),
        }
    }

    /// `S(1), ..., S(N)`.
    pub fn symbols(&self, cutoff: usize) -> Result<Vec<f64>> {
        (1..=cutoff as i64).map(|n| self.symbol(n)).collect()
    }

    /// `E[X_N(x)²]` for this family at cutoff `N`.
    pub fn wick_variance(&self, cutoff: usize) -> Result<WickVariance<f64>> {
        match *self {
            FieldKind::DeepGauss(d) => sigma_deep(d, cutoff),
            FieldKind::ScaledGauss(d) => sigma_shallow(d, cutoff),
            FieldKind::KdVGauss => sigma_kdv(cutoff),
        }
    }

    fn tag(&self) -> (&'static str, String) {
        match self {
            FieldKind::DeepGauss(d) => ("deep", d.to_string()),
            FieldKind::ScaledGauss(d) => ("scaled", d.to_string()),
            FieldKind::KdVGauss => ("kdv", "0".to_string()),
        }
    }

    fn from_tag(kind: &str, delta: &str) -> Result<Self> {
        let d: Depth = delta.parse()?;
        match kind {
            "deep" => Ok(FieldKind::DeepGauss(d)),
            "scaled" => Ok(FieldKind::ScaledGauss(d)),
            "kdv" => Ok(FieldKind::KdVGauss),
            other => Err(Error::Format(format!("unknown field kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (k, d) = self.tag();
        write!(f, "{k}(delta={d})")
    }
}

/// Source of the complex Gaussians `g_n` (`E|g_n|² = 2π`).
pub trait GaussianSource {
    fn gaussian(&self, n: usize) -> Complex64;

    /// `g_1, ..., g_N`.
    fn draw(&self, cutoff: usize) -> Vec<Complex64> {
        (1..=cutoff).map(|n| self.gaussian(n)).collect()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seeded Gaussian source: mode `n` always reads ChaCha stream `n`, so equal
/// seeds give bit-identical `g_n` whatever the cutoff or field kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SeededRng {
    pub seed: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng { seed }
    }

    /// Independent source for ensemble member `i`.
    pub fn member(&self, i: u64) -> SeededRng {
        SeededRng { seed: splitmix64(self.seed ^ splitmix64(i.wrapping_add(0xA076_1D64_78BD_642F))) }
    }

    /// Sequential generator for chains and auxiliary draws, independent of the mode streams.
    pub fn sequential(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(self.seed ^ 0x5EED_5EED_5EED_5EED));
        rng.set_stream(u64::MAX);
        rng
    }
}

impl GaussianSource for SeededRng {
    fn gaussian(&self, n: usize) -> Complex64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(n as u64);
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * PI.sqrt()
    }
}

/// Degenerate source with `g_n ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroSource;

impl GaussianSource for ZeroSource {
    fn gaussian(&self, _n: usize) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
}

/// Mean-zero real field with coefficients `f̂(1), ..., f̂(N)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralField {
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    /// Field from `f̂(1..=N)`; coefficients must be finite.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        debug_assert!(coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        SpectralField { coeffs }
    }

    pub fn zeros(cutoff: usize) -> Self {
        SpectralField { coeffs: vec![Complex64::new(0.0, 0.0); cutoff] }
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients for `n = 1..=N`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `f̂(n)` for any integer `n`, using Hermitian symmetry and zero padding.
    pub fn coeff(&self, n: i64) -> Complex64 {
        if n == 0 || n.unsigned_abs() as usize > self.coeffs.len() {
            return Complex64::new(0.0, 0.0);
        }
        let c = self.coeffs[n.unsigned_abs() as usize - 1];
        if n > 0 {
            c
        } else {
            c.conj()
        }
    }

    /// Spatial mean `f̂(0) / 2π`; identically zero by construction.
    pub fn mean(&self) -> f64 {
        0.0
    }

    /// Point value `f(x) = (1/π) Σ_{n≥1} Re(f̂(n) e^{inx})`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            acc += (c * Complex64::from_polar(1.0, (i + 1) as f64 * x)).re;
        }
        acc / PI
    }

    /// Builds `g_n / sqrt(S(n))` from precomputed Gaussians.
    pub fn from_gaussians(kind: FieldKind, g: &[Complex64]) -> Result<Self> {
        kind.validate()?;
        let coeffs = g
            .iter()
            .enumerate()
            .map(|(i, &gn)| Ok(gn / kind.symbol(i as i64 + 1)?.sqrt()))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectralField { coeffs })
    }

    /// `((1/2π) Σ_{0<|n|≤N} ⟨n⟩^{2s} |f̂(n)|²)^{1/2}` with `⟨n⟩ = (1 + n²)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.sobolev_norm_sq(s).sqrt()
    }

    pub fn sobolev_norm_sq(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            acc += (1.0 + n * n).powf(s) * c.norm_sqr();
        }
        acc / PI
    }

    /// `∫ f² dx = (1/2π) Σ |f̂(n)|²`.
    pub fn l2_sq(&self) -> f64 {
        self.sobolev_norm_sq(0.0)
    }

    /// Dirichlet projection onto `|n| ≤ M`, returned with cutoff `min(N, M)`.
    pub fn project(&self, m: usize) -> SpectralField {
        SpectralField { coeffs: self.coeffs[..m.min(self.coeffs.len())].to_vec() }
    }

    /// Same field represented with cutoff exactly `M` (truncating or zero-padding).
    pub fn with_cutoff(&self, m: usize) -> SpectralField {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(m, Complex64::new(0.0, 0.0));
        SpectralField { coeffs }
    }

    /// `f(· - θ)`: multiplies `f̂(n)` by `e^{-inθ}`.
    pub fn translate(&self, theta: f64) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Complex64::from_polar(1.0, -((i + 1) as f64) * theta))
            .collect();
        SpectralField { coeffs }
    }

    pub fn scale(&self, a: f64) -> SpectralField {
        SpectralField { coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    /// `self - other`, padding the shorter field with zeros.
    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let n = self.cutoff().max(other.cutoff());
        let coeffs = (1..=n as i64).map(|k| self.coeff(k) - other.coeff(k)).collect();
        SpectralField { coeffs }
    }

    /// Values on the uniform grid `x_j = 2πj/M`; requires `M ≥ 2N + 1`.
    pub fn to_physical(&self, m: usize) -> Result<Vec<f64>> {
        let mut grid = SpectralGrid::new(m);
        let mut out = vec![0.0; m];
        grid.synthesize(&self.coeffs, &mut out)?;
        Ok(out)
    }

    /// Coefficients `|n| ≤ N` of grid data; the mean and higher modes are discarded.
    pub fn from_physical(values: &[f64], cutoff: usize) -> Result<SpectralField> {
        let mut grid = SpectralGrid::new(values.len());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); cutoff];
        grid.analyze(values, &mut coeffs)?;
        Ok(SpectralField { coeffs })
    }

    /// Writes the snapshot CSV: a `#` metadata line, a header, one row per mode.
    pub fn write_snapshot<W: Write>(&self, mut w: W, kind: FieldKind, seed: Option<u64>) -> Result<()> {
        let (k, d) = kind.tag();
        let seed = seed.map_or("-".to_string(), |s| s.to_string());
        writeln!(w, "# ilw-field N={} kind={} delta={} seed={}", self.cutoff(), k, d, seed)?;
        writeln!(w, "n,re,im")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            writeln!(w, "{},{:e},{:e}", i + 1, c.re, c.im)?;
        }
        Ok(())
    }

    /// Parses a snapshot written by [`SpectralField::write_snapshot`].
    pub fn read_snapshot<R: BufRead>(r: R) -> Result<FieldSnapshot> {
        let mut lines = r.lines();
        let meta = lines.next().ok_or_else(|| Error::Format("empty snapshot".into()))??;
        let meta = meta
            .strip_prefix("# ilw-field ")
            .ok_or_else(|| Error::Format("missing '# ilw-field' metadata line".into()))?;
        let mut cutoff = None;
        let mut kind = None;
        let mut delta = None;
        let mut seed = None;
        for kv in meta.split_whitespace() {
            let (key, val) = kv
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad metadata entry '{kv}'")))?;
            match key {
                "N" => cutoff = Some(val.parse::<usize>().map_err(|e| Error::Format(e.to_string()))?),
                "kind" => kind = Some(val.to_string()),
                "delta" => delta = Some(val.to_string()),
                "seed" => {
                    seed = if val == "-" {
                        None
                    } else {
                        Some(val.parse::<u64>().map_err(|e| Error::Format(e.to_string()))?)
                    }
                }
                _ => {}
            }
        }
        let cutoff = cutoff.ok_or_else(|| Error::Format("missing N".into()))?;
        let kind = FieldKind::from_tag(
            kind.as_deref().ok_or_else(|| Error::Format("missing kind".into()))?,
            delta.as_deref().unwrap_or("0"),
        )?;
        match lines.next() {
            Some(Ok(h)) if h.trim() == "n,re,im" => {}
            _ => return Err(Error::Format("missing 'n,re,im' header".into())),
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); cutoff];
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut next = || -> Result<&str> {
                parts.next().ok_or_else(|| Error::Format(format!("short row '{line}'")))
            };
            let n: usize = next()?.trim().parse().map_err(|_| Error::Format("bad mode index".into()))?;
            let re: f64 = next()?.trim().parse().map_err(|_| Error::Format("bad real part".into()))?;
            let im: f64 = next()?.trim().parse().map_err(|_| Error::Format("bad imaginary part".into()))?;
            if n == 0 || n > cutoff {
                return Err(Error::Format(format!("mode {n} outside 1..={cutoff}")));
            }
            coeffs[n - 1] = Complex64::new(re, im);
        }
        Ok(FieldSnapshot { field: SpectralField { coeffs }, kind, seed })
    }
}

/// A field read back from a snapshot file together with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub field: SpectralField,
    pub kind: FieldKind,
    pub seed: Option<u64>,
}

/// Draws a field of the given kind with cutoff `N`.
pub fn sample_field(kind: FieldKind, cutoff: usize, source: &impl GaussianSource) -> Result<SpectralField> {
    if cutoff == 0 {
        return Err(Error::Domain("cutoff must be at least 1".into()));
    }
    SpectralField::from_gaussians(kind, &source.draw(cutoff))
}

/// Cached FFT plans and buffers for one physical grid size `M`.
pub struct SpectralGrid {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SpectralGrid {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m.max(1));
        let inv = planner.plan_fft_inverse(m.max(1));
        let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        SpectralGrid {
            m,
            fwd,
            inv,
            buf: vec![Complex64::new(0.0, 0.0); m.max(1)],
            scratch: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    fn check(&self, cutoff: usize) -> Result<()> {
        if self.m < 2 * cutoff + 1 {
            Err(Error::Aliasing { grid: self.m, required: 2 * cutoff + 1 })
        } else {
            Ok(())
        }
    }

    /// `out[j] = (1/2π) Σ_{0<|n|≤N} f̂(n) e^{inx_j}`.
    pub fn synthesize(&mut self, coeffs: &[Complex64], out: &mut [f64]) -> Result<()> {
        self.check(coeffs.len())?;
        let m = self.m;
        self.buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        for (i, &c) in coeffs.iter().enumerate() {
            self.buf[i + 1] = c;
            self.buf[m - i - 1] = c.conj();
        }
        self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
        let scale = 1.0 / (2.0 * PI);
        for (o, b) in out.iter_mut().zip(&self.buf) {
            *o = b.re * scale;
        }
        Ok(())
    }

    /// Largest imaginary part left by the last [`SpectralGrid::synthesize`].
    pub fn last_imag_residual(&self) -> f64 {
        self.buf.iter().map(|b| b.im.abs()).fold(0.0, f64::max) / (2.0 * PI)
    }

    /// `out[n-1] = (2π/M) Σ_j f(x_j) e^{-inx_j}` for `n = 1..=out.len()`.
    pub fn analyze(&mut self, values: &[f64], out: &mut [Complex64]) -> Result<()> {
        self.check(out.len())?;
        if values.len() != self.m {
            return Err(Error::Domain(format!("expected {} grid values, got {}", self.m, values.len())));
        }
        for (b, &v) in self.buf.iter_mut().zip(values) {
            *b = Complex64::new(v, 0.0);
        }
        self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
        let scale = 2.0 * PI / self.m as f64;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.buf[i + 1] * scale;
        }
        Ok(())
    }
}

/// Monte-Carlo estimate of `(E‖X_{δ,N} - X_{BO,N}‖²_{H^{-ε}})^{1/2}` from coupled draws.
pub fn deep_limit_gap(depth: Depth, cutoff: usize, samples: usize, eps: f64, rng: &SeededRng) -> Result<Estimate> {
    if samples < 2 {
        return Err(Error::Domain("deep_limit_gap needs at least two samples".into()));
    }
    let deep = FieldKind::DeepGauss(depth);
    let bo = FieldKind::DeepGauss(DepthParam::Infinite);
    deep.validate()?;
    // per-mode coupling factor 1/sqrt(K) - 1/sqrt(|n|)
    let factors: Vec<f64> = (1..=cutoff as i64)
        .map(|n| Ok(1.0 / deep.symbol(n)?.sqrt() - 1.0 / bo.symbol(n)?.sqrt()))
        .collect::<Result<_>>()?;
    let sq: Vec<f64> = (0..samples as u64)
        .map(|i| {
            let g = rng.member(i).draw(cutoff);
            let diff = SpectralField::new(g.iter().zip(&factors).map(|(g, f)| g * f).collect());
            diff.sobolev_norm_sq(-eps)
        })
        .collect();
    let e = mean_se(&sq);
    let gap = e.value.sqrt();
    let se = if gap > 0.0 { e.stderr / (2.0 * gap) } else { 0.0 };
    Ok(Estimate::new(gap, se))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_draws() {
        let a = SeededRng::new(42);
        let b = SeededRng::new(42);
        assert_eq!(a.draw(16), b.draw(16));
        assert_eq!(a.draw(8)[..], b.draw(16)[..8]);
        assert_ne!(a.member(0).draw(4), a.member(1).draw(4));
    }

    #[test]
    fn scaled_field_couples_exactly() {
        let rng = SeededRng::new(7);
        for &d in &[0.1, 1.0, 5.0] {
            let x = sample_field(FieldKind::DeepGauss(Depth::Finite(d)), 32, &rng).unwrap();
            let xt = sample_field(FieldKind::ScaledGauss(Depth::Finite(d)), 32, &rng).unwrap();
            let s = (d / 3.0).sqrt();
            for (a, b) in x.coeffs().iter().zip(xt.coeffs()) {
                assert!((a * s - b).norm() <= 1e-14 * b.norm());
            }
        }
    }

    #[test]
    fn invalid_pairings() {
        let rng = SeededRng::new(1);
        assert!(sample_field(FieldKind::ScaledGauss(Depth::Infinite), 4, &rng).is_err());
        assert!(sample_field(FieldKind::DeepGauss(Depth::Shallow), 4, &rng).is_err());
        assert!(sample_field(FieldKind::ScaledGauss(Depth::Shallow), 4, &rng).is_err());
    }

    #[test]
    fn zero_source_gives_zero_field() {
        let f = sample_field(FieldKind::KdVGauss, 8, &ZeroSource).unwrap();
        assert_eq!(f.sobolev_norm(0.0), 0.0);
        assert_eq!(f.sobolev_norm(-0.5), 0.0);
        assert_eq!(f.to_physical(17).unwrap(), vec![0.0; 17]);
    }

    #[test]
    fn single_mode_norm() {
        let mut f = SpectralField::zeros(3);
        f.coeffs_mut()[0] = Complex64::new((2.0 * PI).sqrt(), 0.0);
        assert!((f.sobolev_norm(0.0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn projection_properties() {
        let f = sample_field(FieldKind::DeepGauss(Depth::Finite(2.0)), 20, &SeededRng::new(3)).unwrap();
        assert_eq!(f.project(20), f);
        assert_eq!(f.project(12).project(7), f.project(7));
        assert_eq!(f.project(7).project(12), f.project(7));
        for &s in &[-1.0, -0.25, 0.0, 0.5] {
            assert!(f.project(9).sobolev_norm(s) <= f.sobolev_norm(s));
        }
    }

    #[test]
    fn cosine_round_trip() {
        let mut f = SpectralField::zeros(1);
        f.coeffs_mut()[0] = Complex64::new(PI, 0.0);
        let m = 16;
        let v = f.to_physical(m).unwrap();
        for (j, val) in v.iter().enumerate() {
            let x = 2.0 * PI * j as f64 / m as f64;
            assert!((val - x.cos()).abs() < 1e-15);
        }
        let back = SpectralField::from_physical(&v, 1).unwrap();
        assert!((back.coeffs()[0] - Complex64::new(PI, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn constant_grid_is_zero_field() {
        let f = SpectralField::from_physical(&[3.5; 32], 10).unwrap();
        assert!(f.coeffs().iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn random_round_trip_and_reality() {
        let n = 24;
        let f = sample_field(FieldKind::DeepGauss(Depth::Infinite), n, &SeededRng::new(11)).unwrap();
        let m = 4 * n;
        let mut grid = SpectralGrid::new(m);
        let mut v = vec![0.0; m];
        grid.synthesize(f.coeffs(), &mut v).unwrap();
        let scale = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        assert!(grid.last_imag_residual() <= 1e-12 * scale);
        let back = SpectralField::from_physical(&v, n).unwrap();
        let v2 = back.to_physical(m).unwrap();
        let err = v.iter().zip(&v2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-12 * scale);
    }

    #[test]
    fn aliasing_rejected() {
        let f = SpectralField::zeros(8);
        assert!(matches!(f.to_physical(16), Err(Error::Aliasing { .. })));
        assert!(f.to_physical(17).is_ok());
        assert!(SpectralField::from_physical(&[0.0; 10], 5).is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let kind = FieldKind::ScaledGauss(Depth::Finite(0.3));
        let f = sample_field(kind, 6, &SeededRng::new(5)).unwrap();
        let mut buf = Vec::new();
        f.write_snapshot(&mut buf, kind, Some(5)).unwrap();
        let snap = SpectralField::read_snapshot(&buf[..]).unwrap();
        assert_eq!(snap.field, f);
        assert_eq!(snap.kind, kind);
        assert_eq!(snap.seed, Some(5));
        assert!(SpectralField::read_snapshot(&b"n,re,im\n"[..]).is_err());
    }

    #[test]
    fn deep_gap_vs_itself_is_zero() {
        let g = deep_limit_gap(Depth::Infinite, 16, 10, 0.25, &SeededRng::new(1)).unwrap();
        assert_eq!(g.value, 0.0);
    }
}
