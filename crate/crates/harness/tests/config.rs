use ilw_core::dynamics::StepMode;
use ilw_harness::cli::command_defaults;
use ilw_harness::config::{depth_of, DensityKind, ExperimentConfig, OUT_ENV};
use ilw_core::Depth;

#[test]
fn round_trips_through_toml() {
    let mut c = command_defaults("deep-limit");
    c.deltas = vec![0.1, 1.0 / 3.0, 2.0, f64::INFINITY];
    c.k_cut = 0.7;
    c.density = DensityKind::Tamed;
    c.dt.mode = StepMode::Fixed(1e-3);
    c.out_dir = Some("some/where".into());
    let text = c.to_toml().unwrap();
    assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
    let d = ExperimentConfig::default();
    assert_eq!(ExperimentConfig::from_toml(&d.to_toml().unwrap()).unwrap(), d);
}

#[test]
fn missing_keys_default_and_unknown_keys_fail() {
    let c = ExperimentConfig::from_toml("k = 2\ndensity = \"cutoff\"\n").unwrap();
    assert_eq!(c.k, 2);
    assert_eq!(c.cutoff, ExperimentConfig::default().cutoff);
    assert!(ExperimentConfig::from_toml("kk = 2").is_err());
}

#[test]
fn depth_spelling() {
    assert_eq!(depth_of(f64::INFINITY).unwrap(), Depth::Infinite);
    assert_eq!(depth_of(0.0).unwrap(), Depth::Shallow);
    assert_eq!(depth_of(2.5).unwrap(), Depth::Finite(2.5));
    assert!(depth_of(-1.0).is_err());
}

#[test]
fn output_directory_precedence() {
    let mut c = ExperimentConfig::default();
    std::env::set_var(OUT_ENV, "/tmp/from-env");
    assert_eq!(c.resolved_out_dir(), std::path::PathBuf::from("/tmp/from-env"));
    c.out_dir = Some("explicit".into());
    assert_eq!(c.resolved_out_dir(), std::path::PathBuf::from("explicit"));
    std::env::remove_var(OUT_ENV);
    c.out_dir = None;
    assert_eq!(c.resolved_out_dir(), std::path::PathBuf::from("ilwlab-out"));
}
