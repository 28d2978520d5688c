//! Accuracy/fairness multi-objective evolutionary learning, allocation-only core.
//!
//! Everything in this crate is a pure function of its inputs and seeds:
//! small MLP classifiers trained by mini-batch SGD, datasets with a binary
//! protected attribute and the pre-processing debiasing transforms, the
//! error/ΔTPR objectives, Pareto dominance machinery (non-dominated sorting,
//! crowding, tournament and environmental selection, archive), merge/noise
//! variation operators and exact 2-D hypervolume.
//!
//! IO, configuration files, parallel orchestration and the CLI live in the
//! `fairfront` crate.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod data;
pub mod error;
pub mod indicators;
pub mod metrics;
pub mod model;
pub mod moea;
pub mod rng;
pub mod variation;

pub use data::{Dataset, SynthConfig};
pub use error::{Error, Result};
pub use metrics::ObjectivePoint;
pub use model::{Activation, Architecture, ParamVector, TrainConfig};
pub use moea::{Archive, ArchiveEntry, Fitness, Individual};
