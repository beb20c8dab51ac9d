//! Versioned JSON checkpoints. Floats are written with shortest round-trip
//! formatting and parsed exactly, so a save/load cycle is bit-exact.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{ModelParams, ModelSpec};
use crate::data::Standardizer;
use crate::error::{Error, Result};

pub const FORMAT: &str = "adsb-hqnn-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub spec: ModelSpec,
    pub params: ModelParams,
    pub seed: u64,
    /// Column names the model was trained on, in input order.
    pub feature_names: Vec<String>,
    pub standardizer: Option<Standardizer>,
    /// Free-form description of how the checkpoint was produced.
    #[serde(default)]
    pub recipe: Option<serde_json::Value>,
}

/// Only the header fields, so an incompatible file is reported before its
/// body is interpreted.
#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

impl Checkpoint {
    pub fn new(spec: ModelSpec, params: ModelParams, seed: u64, feature_names: Vec<String>) -> Result<Self> {
        params.check(&spec)?;
        if feature_names.len() != spec.n_features {
            return Err(Error::Shape(format!(
                "{} feature names for a model with {} features",
                feature_names.len(),
                spec.n_features
            )));
        }
        Ok(Self {
            format: FORMAT.into(),
            version: VERSION,
            spec,
            params,
            seed,
            feature_names,
            standardizer: None,
            recipe: None,
        })
    }

    pub fn with_standardizer(mut self, standardizer: Standardizer) -> Self {
        self.standardizer = Some(standardizer);
        self
    }

    pub fn with_recipe(mut self, recipe: serde_json::Value) -> Self {
        self.recipe = Some(recipe);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let header: Header = serde_json::from_str(text)?;
        if header.format != FORMAT {
            return Err(Error::Data(format!("not a checkpoint: format tag {:?}", header.format)));
        }
        if header.version != VERSION {
            return Err(Error::Version {
                found: header.version,
                supported: VERSION,
            });
        }
        let ck: Checkpoint = serde_json::from_str(text)?;
        ck.spec.validate()?;
        ck.params.check(&ck.spec)?;
        Ok(ck)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Parameters;
    use crate::vqc::CircuitSpec;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample(seed: u64, hybrid: bool) -> Checkpoint {
        let spec = if hybrid {
            ModelSpec::hfqnn(3, CircuitSpec::new(2, 2).unwrap()).unwrap()
        } else {
            ModelSpec::fnn(3, 2).unwrap()
        };
        let params = ModelParams::init(&spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        Checkpoint::new(spec, params, seed, vec!["a".into(), "b".into(), "c".into()]).unwrap()
    }

    #[test]
    fn rejects_other_versions() {
        let mut ck = sample(1, true);
        ck.version = VERSION + 1;
        let text = ck.to_json().unwrap();
        assert!(matches!(
            Checkpoint::from_json(&text),
            Err(Error::Version { found, .. }) if found == VERSION + 1
        ));
    }

    #[test]
    fn rejects_foreign_files() {
        assert!(Checkpoint::from_json(r#"{"format":"x","version":1}"#).is_err());
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.json");
        let ck = sample(3, false).with_recipe(serde_json::json!({"epochs": 2}));
        ck.save(&path).unwrap();
        assert_eq!(Checkpoint::load(&path).unwrap(), ck);
    }

    proptest! {
        #[test]
        fn roundtrip_is_bit_exact(seed in any::<u64>(), hybrid in any::<bool>(), scale in -1e300f64..1e300) {
            let mut ck = sample(seed, hybrid);
            // Push values across many magnitudes.
            for (i, t) in ck.params.tensors_mut().into_iter().enumerate() {
                for (j, v) in t.iter_mut().enumerate() {
                    *v *= scale / (1.0 + (i * 7 + j) as f64).powi(40);
                }
            }
            let back = Checkpoint::from_json(&ck.to_json().unwrap()).unwrap();
            let a: Vec<u64> = ck.params.flatten().iter().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = back.params.flatten().iter().map(|v| v.to_bits()).collect();
            prop_assert_eq!(a, b);
            prop_assert_eq!(back, ck);
        }
    }
}
