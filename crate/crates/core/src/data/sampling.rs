use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FeatureMatrix, ATTACK, NORMAL};
use crate::error::{Error, Result};

/// `n` attack rows plus `floor(ratio * n)` normal rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub n_attack: usize,
    pub ratio: f64,
    pub seed: u64,
}

impl SamplingPlan {
    pub fn n_normal(&self) -> usize {
        (self.ratio * self.n_attack as f64).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_attack == 0 {
            return Err(Error::Config("attack sample count must be at least 1".into()));
        }
        if !(self.ratio.is_finite() && self.ratio > 0.0) {
            return Err(Error::Config(format!(
                "normal-to-attack ratio must be positive, got {}",
                self.ratio
            )));
        }
        Ok(())
    }
}

/// Seeded sampling without replacement from each class; output rows are shuffled.
pub fn sample_stratified(features: &FeatureMatrix, plan: &SamplingPlan) -> Result<FeatureMatrix> {
    plan.validate()?;
    let attack = features.rows_with_label(ATTACK);
    let normal = features.rows_with_label(NORMAL);
    let n_normal = plan.n_normal();
    if attack.len() < plan.n_attack || normal.len() < n_normal {
        return Err(Error::Data(format!(
            "sampling needs {} attack and {n_normal} normal rows; {} attack and {} normal available",
            plan.n_attack,
            attack.len(),
            normal.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut rows: Vec<usize> = index::sample(&mut rng, attack.len(), plan.n_attack)
        .into_iter()
        .map(|i| attack[i])
        .collect();
    rows.extend(
        index::sample(&mut rng, normal.len(), n_normal)
            .into_iter()
            .map(|i| normal[i]),
    );
    rows.shuffle(&mut rng);
    Ok(features.select_rows(&rows))
}
