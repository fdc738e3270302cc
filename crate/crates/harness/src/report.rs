//! Long-format CSV tables and JSON run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ilw_core::stats::Estimate;
use ilw_core::{Error, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;

/// One observation: `series` and `metric` at abscissa `x_name = x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub series: String,
    pub x_name: String,
    pub x: f64,
    pub metric: String,
    pub value: f64,
    /// Zero for exact values.
    pub stderr: f64,
}

impl Row {
    pub fn exact(series: impl Into<String>, x_name: &str, x: f64, metric: &str, value: f64) -> Self {
        Row { series: series.into(), x_name: x_name.into(), x, metric: metric.into(), value, stderr: 0.0 }
    }

    pub fn estimate(series: impl Into<String>, x_name: &str, x: f64, metric: &str, e: Estimate) -> Self {
        Row { series: series.into(), x_name: x_name.into(), x, metric: metric.into(), value: e.value, stderr: e.stderr }
    }
}

/// Rows plus a free-form JSON summary.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub rows: Vec<Row>,
    pub summary: serde_json::Value,
}

impl Table {
    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    /// Values of `metric` in row order.
    pub fn column(&self, metric: &str) -> Vec<f64> {
        self.rows.iter().filter(|r| r.metric == metric).map(|r| r.value).collect()
    }

    pub const HEADER: &'static str = "series,x_name,x,metric,value,stderr";

    /// Writes the table with Rust's shortest round-trip float formatting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::HEADER)?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{},{},{}", r.series, r.x_name, r.x, r.metric, r.value, r.stderr)?;
        }
        Ok(())
    }

    /// Aligned plain-text rendering for the terminal.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let se = if r.stderr > 0.0 { format!(" ± {:.2e}", r.stderr) } else { String::new() };
            s.push_str(&format!("{:<24} {:>6} = {:<10} {:<18} {:.6e}{se}\n", r.series, r.x_name, r.x, r.metric, r.value));
        }
        s
    }
}

/// JSON manifest written next to every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub command: &'a str,
    pub config: &'a ExperimentConfig,
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
}

impl<'a> Manifest<'a> {
    pub fn new(command: &'a str, config: &'a ExperimentConfig) -> Self {
        Manifest {
            tool: "ilwlab",
            version: env!("CARGO_PKG_VERSION"),
            core_version: ilw_core::VERSION,
            command,
            config,
            outputs: Vec::new(),
            summary: serde_json::Value::Null,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Serialized writer for one run's output directory.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(OutputDir { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<PathBuf> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        let path = self.root.join(name);
        fs::write(&path, buf)?;
        self.written.push(name.to_string());
        Ok(path)
    }

    /// Writes `<stem>.manifest.json` listing every file written so far.
    pub fn finish(mut self, stem: &str, mut manifest: Manifest<'_>) -> Result<PathBuf> {
        manifest.outputs = std::mem::take(&mut self.written);
        let json = manifest.to_json()?;
        self.write(&format!("{stem}.manifest.json"), |b| Ok(b.extend_from_slice(json.as_bytes())))
    }
}
