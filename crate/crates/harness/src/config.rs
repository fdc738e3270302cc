//! Experiment configuration: a TOML file with CLI overrides.

use std::path::{Path, PathBuf};

use ilw_core::dynamics::{DtPolicy, EvolveOptions, Family, StepMode};
use ilw_core::gibbs::DensitySpec;
use ilw_core::{Depth, Error, Result};
use serde::{Deserialize, Serialize};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "ILWLAB_OUT";

/// Equation family selector used in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// gILW, with `delta = inf` for gBO.
    Deep,
    /// Scaled gILW, with `delta = 0` for gKdV.
    Scaled,
}

/// Gibbs density selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DensityKind {
    Unit,
    Defocusing,
    Cutoff,
    Tamed,
}

/// Sampler used by the `sample` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Snis,
    Mh,
}

/// Every numeric parameter of a run. Missing keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub family: FamilyKind,
    /// Nonlinearity degree `k`.
    pub k: usize,
    /// Frequency cutoff `N`.
    pub cutoff: usize,
    /// Depth grid; single-depth commands use the first entry.
    pub deltas: Vec<f64>,
    /// Largest mode in symbol tables and closed-form distances.
    pub nmax: usize,
    pub density: DensityKind,
    /// Cutoff level `K` of the `k = 2` measure.
    pub k_cut: f64,
    /// Taming constant `A`.
    pub a: f64,
    pub sampler: SamplerKind,
    /// Proposal step of the pCN chain.
    pub mh_step: f64,
    /// Monte-Carlo sample count or ensemble size.
    pub samples: usize,
    /// Time horizon `T`.
    pub horizon: f64,
    pub dt: DtPolicy,
    pub snapshots: usize,
    /// Sobolev index for trajectory gaps.
    pub s: f64,
    /// Sobolev loss `ε` in the coupled field gap `‖X_δ - X_BO‖_{H^{-ε}}`.
    pub eps: f64,
    /// Coupled draws averaged in limit studies.
    pub draws: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: "run".into(),
            family: FamilyKind::Deep,
            k: 3,
            cutoff: 16,
            deltas: vec![2.0],
            nmax: 16,
            density: DensityKind::Defocusing,
            k_cut: 1.0,
            a: 0.5,
            sampler: SamplerKind::Snis,
            mh_step: 0.5,
            samples: 10_000,
            horizon: 1.0,
            dt: DtPolicy::default(),
            snapshots: 10,
            s: -0.5,
            eps: 1e-3,
            draws: 1,
            seed: 7,
            out_dir: None,
        }
    }
}

/// Depth value as written in configs: `inf` is the deep limit, `0` the shallow one.
pub fn depth_of(delta: f64) -> Result<Depth> {
    if delta == f64::INFINITY {
        Ok(Depth::Infinite)
    } else if delta == 0.0 {
        Ok(Depth::Shallow)
    } else {
        Depth::finite(delta)
    }
}

impl ExperimentConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn delta(&self) -> Result<f64> {
        self.deltas.first().copied().ok_or_else(|| Error::Domain("empty depth grid".into()))
    }

    pub fn family_at(&self, delta: f64) -> Result<Family> {
        let d = depth_of(delta)?;
        Ok(match self.family {
            FamilyKind::Deep => Family::DeepGILW(d),
            FamilyKind::Scaled => Family::ScaledGILW(d),
        })
    }

    pub fn density_spec(&self) -> DensitySpec {
        match self.density {
            DensityKind::Unit => DensitySpec::Unit,
            DensityKind::Defocusing => DensitySpec::Defocusing,
            DensityKind::Cutoff => DensitySpec::CutoffCubic { k_cut: self.k_cut },
            DensityKind::Tamed => DensitySpec::TamedCubic { a: self.a },
        }
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions { dt: self.dt, snapshots: self.snapshots, sobolev_s: self.s }
    }

    /// Sets an automatic step with the given CFL number.
    pub fn set_cfl(&mut self, cfl: f64) {
        self.dt.mode = StepMode::Auto { cfl };
    }

    /// Explicit directory, then `$ILWLAB_OUT`, then `./ilwlab-out`.
    pub fn resolved_out_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("ilwlab-out"))
    }
}
