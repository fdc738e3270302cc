//! The `ilwlab` command line, driven in-process.

use std::fs;
use std::path::Path;

use ilw_core::dispersion::{h_shallow, k_delta, l_delta};
use ilw_core::Depth;
use ilw_harness::cli::{run, EXIT_FAILED, EXIT_OK, EXIT_USAGE};

fn ilwlab(args: &[&str]) -> i32 {
    run(std::iter::once("ilwlab").chain(args.iter().copied()))
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn metric(rows: &[Vec<String>], name: &str) -> Vec<f64> {
    rows.iter().filter(|r| r[3] == name).map(|r| r[4].parse().unwrap()).collect()
}

#[test]
fn symbols_match_library_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(ilwlab(&["symbols", "--delta", "1", "--nmax", "8", "--out", out]), EXIT_OK);
    let rows = csv_rows(&dir.path().join("symbols.csv"));
    let d = Depth::Finite(1.0);
    for (n, v) in metric(&rows, "K").iter().enumerate() {
        assert_eq!(*v, k_delta(d, n as i64 + 1).unwrap());
    }
    for (n, v) in metric(&rows, "L").iter().enumerate() {
        assert_eq!(*v, l_delta(d, n as i64 + 1).unwrap());
    }
    for (n, v) in metric(&rows, "h").iter().enumerate() {
        assert_eq!(*v, h_shallow(d, n as i64 + 1).unwrap());
    }
    assert_eq!(metric(&rows, "K").len(), 8);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("symbols.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["config"]["nmax"], 8);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(ilwlab(&["symbols", "--no-such-flag"]), EXIT_USAGE);
    assert_eq!(ilwlab(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(ilwlab(&[]), EXIT_USAGE);
    assert_eq!(ilwlab(&["--help"]), EXIT_OK);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(ilwlab(&["symbols", "--delta", "-1", "--out", out]), EXIT_USAGE);
}

#[test]
fn deep_limit_columns_decrease() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = ["deep-limit", "--k", "3", "--N", "16", "--deltas", "2,8,32,128", "--T", "1", "--seed", "7", "--out", out];
    assert_eq!(ilwlab(&args), EXIT_OK);
    let rows = csv_rows(&dir.path().join("deep-limit.csv"));
    for m in ["sup_gap", "gibbs_tv", "gaussian_kl", "field_gap"] {
        let v = metric(&rows, m);
        assert_eq!(v.len(), 4, "{m}");
        assert!(v.windows(2).all(|w| w[1] < w[0]), "{m}: {v:?}");
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = d.path().to_str().unwrap();
        assert_eq!(ilwlab(&["sample", "--N", "8", "--samples", "500", "--seed", "3", "--out", out]), EXIT_OK);
        assert_eq!(ilwlab(&["evolve", "--N", "8", "--T", "0.2", "--seed", "3", "--out", out]), EXIT_OK);
    }
    for f in ["sample.csv", "evolve.csv", "evolve.final.csv"] {
        let x = fs::read(a.path().join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "experiment = \"tbl\"\ndeltas = [2.0, inf]\nnmax = 3\n").unwrap();
    let out = dir.path().join("o");
    let code = ilwlab(&["symbols", "--config", cfg.to_str().unwrap(), "--nmax", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let rows = csv_rows(&out.join("tbl.csv"));
    assert_eq!(metric(&rows, "K").len(), 10);
    assert_eq!(metric(&rows, "L").len(), 5);
    fs::write(&cfg, "bogus_key = 1\n").unwrap();
    assert_eq!(ilwlab(&["symbols", "--config", cfg.to_str().unwrap()]), EXIT_USAGE);
}

#[test]
fn quick_acceptance_subset_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(ilwlab(&["acceptance", "--quick", "--only", "1,3", "--out", out]), EXIT_OK);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("acceptance.json")).unwrap()).unwrap();
    assert_eq!(report["results"].as_array().unwrap().len(), 2);
    assert_eq!(report["pass"], true);
    assert_eq!(ilwlab(&["acceptance", "--quick", "--only", "14", "--out", out]), EXIT_FAILED);
}

#[test]
fn remaining_commands_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cases: [&[&str]; 4] = [
        &["wick", "--N", "32"],
        &["distances", "--nmax", "200", "--N", "16", "--samples", "200"],
        &["invariance", "--samples", "1000", "--T", "0.1"],
        &["shallow-limit", "--N", "8", "--samples", "300", "--T", "0.2"],
    ];
    for args in cases {
        let mut full = args.to_vec();
        full.extend(["--out", out]);
        assert_eq!(ilwlab(&full), EXIT_OK, "{args:?}");
        assert!(dir.path().join(format!("{}.csv", args[0])).exists());
        assert!(dir.path().join(format!("{}.manifest.json", args[0])).exists());
    }
}
