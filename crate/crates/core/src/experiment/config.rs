use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::SamplingPlan;
use crate::error::{Error, Result};
use crate::nn::{LossKind, ModelKind, TrainConfig};
use crate::statevector::MAX_QUBITS;

/// Dataset name that selects the built-in trajectory generator.
pub const SYNTHETIC: &str = "synthetic";

/// Every effective setting of one run. Serialized into each report so that
/// the report alone is enough to rerun it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// CSV path, or `synthetic`.
    pub dataset: String,
    pub model: ModelKind,
    pub loss: LossKind,
    pub attack_samples: usize,
    pub ratio: f64,
    pub qubits: usize,
    pub layers: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    /// Absolute correlation at or above which the later column is dropped.
    pub threshold: f64,
    /// Where report and checkpoint files go. Not part of the recipe.
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Directory for prepared-split caches. Not part of the recipe.
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: SYNTHETIC.into(),
            model: ModelKind::Hfqnn,
            loss: LossKind::BceWithLogits,
            attack_samples: 1000,
            ratio: 2.0,
            qubits: 6,
            layers: 2,
            epochs: 150,
            learning_rate: 0.02,
            batch_size: 64,
            seed: 0,
            threshold: 0.9,
            out: None,
            cache_dir: None,
        }
    }
}

/// A layer of optional settings: a config file, command-line flags or the
/// base section of a grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialConfig {
    pub dataset: Option<String>,
    pub model: Option<ModelKind>,
    pub loss: Option<LossKind>,
    pub attack_samples: Option<usize>,
    pub ratio: Option<f64>,
    pub qubits: Option<usize>,
    pub layers: Option<usize>,
    pub epochs: Option<usize>,
    #[serde(alias = "lr")]
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub seed: Option<u64>,
    pub threshold: Option<f64>,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

impl PartialConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(toml::from_str(&text)?)
    }
}

impl ExperimentConfig {
    /// Writes every value present in `layer` over `self`.
    pub fn apply(&mut self, layer: &PartialConfig) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &layer.$field {
                    self.$field = v.clone();
                })*
            };
        }
        take!(dataset, model, loss, attack_samples, ratio, qubits, layers, epochs, learning_rate, batch_size, seed, threshold);
        if layer.out.is_some() {
            self.out.clone_from(&layer.out);
        }
        if layer.cache_dir.is_some() {
            self.cache_dir.clone_from(&layer.cache_dir);
        }
    }

    /// Defaults, then the optional config file, then command-line flags.
    pub fn resolve(file: Option<&Path>, flags: &PartialConfig) -> Result<Self> {
        let mut config = Self::default();
        if let Some(path) = file {
            config.apply(&PartialConfig::from_toml_file(path)?);
        }
        config.apply(flags);
        config.validate()?;
        Ok(config)
    }

    pub fn is_synthetic(&self) -> bool {
        self.dataset.eq_ignore_ascii_case(SYNTHETIC)
    }

    pub fn plan(&self, seed: u64) -> SamplingPlan {
        SamplingPlan {
            n_attack: self.attack_samples,
            ratio: self.ratio,
            seed,
        }
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            loss: self.loss,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.is_synthetic() && !Path::new(&self.dataset).is_file() {
            return Err(Error::Config(format!("dataset file {:?} does not exist", self.dataset)));
        }
        self.plan(0).validate()?;
        self.train_config(0).validate()?;
        if self.qubits == 0 || self.qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {}",
                self.qubits
            )));
        }
        if self.layers == 0 {
            return Err(Error::Config("layer count must be at least 1".into()));
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::Config(format!(
                "correlation threshold must be in (0, 1], got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}
