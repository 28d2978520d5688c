//! Run configuration, read from TOML and overridable from the command line.

use std::fs;
use std::path::{Path, PathBuf};

use fairfront_core::model::{Activation, Architecture, TrainConfig};
use fairfront_core::{ObjectivePoint, SynthConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum DataSource {
    Synthetic(SynthConfig),
    Csv { path: PathBuf },
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource::Synthetic(SynthConfig::default())
    }
}

/// Hidden layout of every classifier; the input width comes from the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub hidden_dims: Vec<usize>,
    pub activation: Activation,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            hidden_dims: vec![16],
            activation: Activation::Relu,
        }
    }
}

impl ModelConfig {
    pub fn architecture(&self, input_dim: usize) -> Result<Architecture> {
        Ok(Architecture::new(
            input_dim,
            self.hidden_dims.clone(),
            self.activation,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettings {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs_per_tune: usize,
}

impl Default for TrainSettings {
    fn default() -> Self {
        let d = TrainConfig::default();
        TrainSettings {
            learning_rate: d.learning_rate,
            batch_size: d.batch_size,
            epochs_per_tune: d.epochs_per_tune,
        }
    }
}

impl TrainSettings {
    pub fn with_seed(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            epochs_per_tune: self.epochs_per_tune,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub population_size: usize,
    pub generations: usize,
    pub trials: usize,
    pub mutation_lambda: f64,
    pub merge_alpha: f64,
    pub master_seed: u64,
    /// `(train, validation, test)` fractions.
    pub split: [f64; 3],
    /// Hypervolume reference point `(error, ΔTPR)`.
    pub hv_ref: [f64; 2],
    /// Epochs for each baseline model; defaults to `generations × epochs_per_tune`.
    pub baseline_epochs: Option<usize>,
    /// Parallel workers; 0 uses every core. Never affects results.
    #[serde(skip_serializing)]
    pub workers: usize,
    pub train: TrainSettings,
    pub model: ModelConfig,
    pub data: DataSource,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            population_size: 50,
            generations: 20,
            trials: 10,
            mutation_lambda: 0.02,
            merge_alpha: 0.5,
            master_seed: 0,
            split: [0.6, 0.2, 0.2],
            hv_ref: [1.0, 1.0],
            baseline_epochs: None,
            workers: 0,
            train: TrainSettings::default(),
            model: ModelConfig::default(),
            data: DataSource::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn hv_reference(&self) -> ObjectivePoint {
        ObjectivePoint::new(self.hv_ref[0], self.hv_ref[1])
    }

    pub fn split_fractions(&self) -> (f64, f64, f64) {
        (self.split[0], self.split[1], self.split[2])
    }

    pub fn baseline_epochs(&self) -> usize {
        self.baseline_epochs
            .unwrap_or(self.generations * self.train.epochs_per_tune)
            .max(1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        // The config is echoed into the TOML manifest, whose integers are i64.
        if self.master_seed > i64::MAX as u64 {
            return bad("master_seed must be <= 2^63 - 1");
        }
        if let DataSource::Synthetic(s) = &self.data {
            if s.seed > i64::MAX as u64 {
                return bad("data.seed must be <= 2^63 - 1");
            }
        }
        if self.population_size < 2 {
            return bad("population_size must be >= 2");
        }
        if self.generations < 1 {
            return bad("generations must be >= 1");
        }
        if self.trials < 1 {
            return bad("trials must be >= 1");
        }
        if !(self.mutation_lambda.is_finite() && self.mutation_lambda >= 0.0) {
            return bad("mutation_lambda must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.merge_alpha) {
            return bad("merge_alpha must lie in [0, 1]");
        }
        if self.split.iter().any(|&f| f.is_nan() || f <= 0.0) || (self.split.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("split fractions must be positive and sum to 1");
        }
        if self.hv_ref.iter().any(|v| !v.is_finite()) {
            return bad("hv_ref must be finite");
        }
        if self.train.batch_size == 0 || self.train.epochs_per_tune == 0 {
            return bad("train.batch_size and train.epochs_per_tune must be positive");
        }
        if !(self.train.learning_rate.is_finite() && self.train.learning_rate >= 0.0) {
            return bad("train.learning_rate must be >= 0");
        }
        if self.model.hidden_dims.contains(&0) {
            return bad("model.hidden_dims entries must be positive");
        }
        if let DataSource::Synthetic(s) = &self.data {
            s.validate()?;
        }
        Ok(())
    }
}
