//! Experiment harness for the ILW spectral laboratory: configuration,
//! seeded experiments, report writing, the acceptance suite and the
//! `ilwlab` command line.

pub mod acceptance;
pub mod cli;
pub mod config;
pub mod experiments;
pub mod report;

pub use acceptance::{run_criterion, run_suite, AcceptanceReport, CriterionResult, Scale};
pub use config::ExperimentConfig;
