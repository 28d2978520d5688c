//! Evolutionary accuracy/fairness learning: data files, the generational
//! engine, baselines, run artifacts, reports and the CLI.
//!
//! The algorithms themselves live in [`fairfront_core`], re-exported here as
//! [`core`].

pub use fairfront_core as core;

pub mod artifacts;
pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod csv_io;
pub mod engine;
pub mod error;
pub mod report;

pub use config::{DataSource, RunConfig};
pub use engine::{run_baseline, run_moel, run_trial, BaselineMethod, RunResult, TrialResult};
pub use error::{Error, Result};

/// Shortest decimal text that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}
