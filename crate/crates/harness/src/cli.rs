//! Command-line front end. Every number it prints comes from [`crate::experiments`]
//! or [`crate::acceptance`].

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ilw_core::dynamics::StepMode;
use ilw_core::gibbs::SamplerInfo;
use ilw_core::Result;
use serde_json::json;

use crate::acceptance::{run_suite, Scale};
use crate::config::{DensityKind, ExperimentConfig, FamilyKind, SamplerKind};
use crate::experiments;
use crate::report::{Manifest, OutputDir, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ilwlab", version, about = "Spectral laboratory for the intermediate long wave family")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dispersion symbols K, L and h over n.
    Symbols(Params),
    /// Wick variances and the Hermite shift residual.
    Wick(Params),
    /// Gibbs ensemble with ESS and normalizing-constant estimate.
    Sample(Params),
    /// KL, Hellinger, Kakutani and Ky-Fan distances over the depth grid.
    Distances(Params),
    /// One trajectory with conservation diagnostics.
    Evolve(Params),
    /// Statistical invariance of a Gibbs ensemble under the flow.
    Invariance(Params),
    /// Measure and trajectory convergence as delta grows.
    DeepLimit(Params),
    /// Measure and trajectory convergence as delta shrinks.
    ShallowLimit(Params),
    /// Runs the acceptance suite.
    Acceptance(AcceptanceArgs),
}

/// Overrides applied on top of the defaults or `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default `$ILWLAB_OUT`, then `./ilwlab-out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub experiment: Option<String>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "N")]
    pub cutoff: Option<usize>,
    /// Single depth; `inf` for the deep limit, `0` for the shallow one.
    #[arg(long, conflicts_with = "deltas", allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Comma-separated depth grid.
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long, value_enum)]
    pub density: Option<DensityKind>,
    #[arg(long = "K")]
    pub k_cut: Option<f64>,
    #[arg(long = "A")]
    pub a: Option<f64>,
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerKind>,
    #[arg(long)]
    pub mh_step: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long = "T", allow_hyphen_values = true)]
    pub horizon: Option<f64>,
    /// Automatic step with this CFL number.
    #[arg(long, conflicts_with = "dt")]
    pub cfl: Option<f64>,
    /// Fixed step.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub drift_tol: Option<f64>,
    #[arg(long)]
    pub snapshots: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    pub print_config: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AcceptanceArgs {
    /// Reduced sample sizes and horizons.
    #[arg(long)]
    pub quick: bool,
    /// Comma-separated criterion ids (default all).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
    /// Directory for acceptance.json (default `$ILWLAB_OUT`, then `./ilwlab-out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Defaults of each command before the config file and flags.
pub fn command_defaults(name: &str) -> ExperimentConfig {
    let mut c = ExperimentConfig { experiment: name.to_string(), ..Default::default() };
    match name {
        "symbols" => {
            c.deltas = vec![1.0];
            c.nmax = 8;
        }
        "wick" => c.deltas = vec![0.5, 1.0, 2.0, 8.0, f64::INFINITY],
        "distances" => {
            c.deltas = vec![2.0, 8.0, 32.0, 128.0];
            c.nmax = 10_000;
            c.cutoff = 64;
            c.samples = 2000;
        }
        "invariance" => {
            c.cutoff = 8;
            c.samples = 10_000;
            c.snapshots = 1;
        }
        "deep-limit" => {
            c.deltas = vec![2.0, 8.0, 32.0, 128.0];
            c.nmax = 10_000;
        }
        "shallow-limit" => {
            c.family = FamilyKind::Scaled;
            c.deltas = vec![0.3, 0.1, 0.03, 0.01];
            c.samples = 4000;
        }
        _ => {}
    }
    c
}

impl Params {
    pub fn resolve(&self, name: &str) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => command_defaults(name),
        };
        macro_rules! set {
            ($($field:ident => $target:ident),* $(,)?) => {
                $(if let Some(v) = self.$field.clone() { c.$target = v; })*
            };
        }
        set!(experiment => experiment, family => family, k => k, cutoff => cutoff, deltas => deltas,
             nmax => nmax, density => density, k_cut => k_cut, a => a, sampler => sampler, mh_step => mh_step,
             samples => samples, horizon => horizon, snapshots => snapshots, s => s, eps => eps,
             draws => draws, seed => seed);
        if let Some(d) = self.delta {
            c.deltas = vec![d];
        }
        if let Some(cfl) = self.cfl {
            c.set_cfl(cfl);
        }
        if let Some(dt) = self.dt {
            c.dt.mode = StepMode::Fixed(dt);
        }
        if let Some(t) = self.drift_tol {
            c.dt.drift_tol = t;
        }
        if self.out.is_some() {
            c.out_dir = self.out.clone();
        }
        Ok(c)
    }
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    let (name, params) = match &cmd {
        Command::Acceptance(a) => return acceptance(a),
        Command::Symbols(p) => ("symbols", p),
        Command::Wick(p) => ("wick", p),
        Command::Sample(p) => ("sample", p),
        Command::Distances(p) => ("distances", p),
        Command::Evolve(p) => ("evolve", p),
        Command::Invariance(p) => ("invariance", p),
        Command::DeepLimit(p) => ("deep-limit", p),
        Command::ShallowLimit(p) => ("shallow-limit", p),
    };
    let cfg = params.resolve(name)?;
    if params.print_config {
        print!("{}", cfg.to_toml()?);
        return Ok(EXIT_OK);
    }
    let mut out = OutputDir::create(&cfg.resolved_out_dir())?;
    let stem = cfg.experiment.clone();
    let mut manifest = Manifest::new(name, &cfg);
    match name {
        "sample" => {
            let ens = experiments::sample(&cfg)?;
            let mass = experiments::wick_mass(&ens.ctx);
            let cols: [(&str, &dyn Fn(&ilw_core::field::SpectralField) -> f64); 1] = [("wick_mass", &mass)];
            out.write(&format!("{stem}.csv"), |b| ens.write_csv(b, &cols))?;
            let em = ens.manifest();
            let mass_est = ens.expect(&mass);
            println!("samples {}  ESS {:.1}  E[wick_mass] {:.6} ± {:.2e}", ens.len(), ens.ess, mass_est.value, mass_est.stderr);
            match ens.sampler {
                SamplerInfo::Snis { z, .. } => println!("Z {:.6e} ± {:.2e}", z.value, z.stderr),
                SamplerInfo::Mh { acceptance, .. } => println!("acceptance {acceptance:.3}"),
            }
            manifest.summary = json!({ "ensemble": em, "wick_mass": mass_est });
        }
        "evolve" => {
            let rec = experiments::evolve_run(&cfg)?;
            out.write(&format!("{stem}.csv"), |b| rec.write_csv(b))?;
            if let Some(f) = rec.snapshots.last() {
                let kind = rec.spec.family.field_kind()?;
                out.write(&format!("{stem}.final.csv"), |b| f.write_snapshot(b, kind, Some(cfg.seed)))?;
            }
            println!("dt {:.3e}  energy drift {:.2e}  L2 drift {:.2e}", rec.dt, rec.energy_drift(), rec.l2_drift());
            manifest.summary = serde_json::to_value(rec.manifest(Some(cfg.seed), cfg.horizon, &cfg.evolve_options()))
                .unwrap_or_default();
        }
        "invariance" => {
            let r = experiments::invariance(&cfg)?;
            let mut t = Table::default();
            for o in &r.observables {
                t.push(crate::report::Row::estimate(&o.name, "t", 0.0, "mean", o.before));
                t.push(crate::report::Row::estimate(&o.name, "t", cfg.horizon, "mean", o.after));
            }
            out.write(&format!("{stem}.csv"), |b| t.write_csv(b))?;
            for o in &r.observables {
                println!(
                    "{:<14} before {:.6} after {:.6} diff {:+.2e} ({:+.2} SE) {}",
                    o.name,
                    o.before.value,
                    o.after.value,
                    o.diff,
                    o.diff / o.combined_se,
                    if o.pass { "pass" } else { "FAIL" }
                );
            }
            println!("ESS {:.1}  max pathwise L2 drift {:.2e}", r.ess, r.max_l2_drift);
            manifest.summary = serde_json::to_value(&r).unwrap_or_default();
        }
        _ => {
            let t = match name {
                "symbols" => experiments::symbols(&cfg)?,
                "wick" => experiments::wick(&cfg)?,
                "distances" => experiments::distances(&cfg)?,
                "deep-limit" => experiments::deep_limit(&cfg)?,
                _ => experiments::shallow_limit(&cfg)?,
            };
            out.write(&format!("{stem}.csv"), |b| t.write_csv(b))?;
            print!("{}", t.render());
            if !t.summary.is_null() {
                println!("{}", serde_json::to_string_pretty(&t.summary).unwrap_or_default());
            }
            manifest.summary = t.summary.clone();
        }
    }
    let path = out.finish(&stem, manifest)?;
    log::info!("manifest written to {}", path.display());
    Ok(EXIT_OK)
}

fn acceptance(args: &AcceptanceArgs) -> Result<i32> {
    let scale = if args.quick { Scale::Quick } else { Scale::Full };
    let report = run_suite(scale, &args.only, |r| println!("{}", r.line()));
    let cfg = ExperimentConfig { experiment: "acceptance".into(), out_dir: args.out.clone(), ..Default::default() };
    let mut out = OutputDir::create(&cfg.resolved_out_dir())?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| ilw_core::Error::Format(e.to_string()))?;
    let path = out.write("acceptance.json", |b| Ok(b.extend_from_slice(json.as_bytes())))?;
    let failed: Vec<u8> = report.results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    println!(
        "{} of {} criteria passed; report in {}",
        report.results.len() - failed.len(),
        report.results.len(),
        path.display()
    );
    Ok(if failed.is_empty() { EXIT_OK } else { EXIT_FAILED })
}

