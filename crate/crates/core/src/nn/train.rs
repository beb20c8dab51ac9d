use ndarray::Axis;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::AdamState;
use super::loss::{loss, LossKind};
use super::model::{model_backward, model_forward, predict, ModelParams, ModelSpec};
use crate::data::{encode_labels, FeatureMatrix};
use crate::error::{Error, Result};
use crate::metrics::{ConfusionMatrix, Metrics};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub loss: LossKind,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 150,
            learning_rate: 0.02,
            batch_size: 64,
            loss: LossKind::BceWithLogits,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// A learning rate of exactly zero is accepted so a run can be frozen.
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean of the mini-batch losses, weighted by batch size.
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_confusion: ConfusionMatrix,
    pub val_metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub params: ModelParams,
    pub history: Vec<EpochRecord>,
}

/// Confusion matrix and scores of the argmax predictions on a labelled set.
pub fn evaluate(
    spec: &ModelSpec,
    params: &ModelParams,
    data: &FeatureMatrix,
) -> Result<(ConfusionMatrix, Metrics)> {
    let pred = predict(spec, params, &data.values)?;
    let cm = ConfusionMatrix::from_labels(&pred, &data.labels)?;
    let m = cm.derive()?;
    Ok((cm, m))
}

fn check_set(name: &str, spec: &ModelSpec, data: &FeatureMatrix) -> Result<()> {
    if data.n_rows() == 0 {
        return Err(Error::Data(format!("{name} set is empty")));
    }
    if data.n_features() != spec.n_features {
        return Err(Error::Shape(format!(
            "model expects {} features, {name} set has {}",
            spec.n_features,
            data.n_features()
        )));
    }
    Ok(())
}

/// Mini-batch Adam from a seeded initialisation. The same seed drives the
/// initial parameters and the per-epoch shuffles.
pub fn train(
    spec: &ModelSpec,
    config: &TrainConfig,
    train_set: &FeatureMatrix,
    val_set: &FeatureMatrix,
) -> Result<TrainOutcome> {
    config.validate()?;
    spec.validate()?;
    check_set("training", spec, train_set)?;
    check_set("validation", spec, val_set)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = ModelParams::init(spec, &mut rng)?;
    let mut adam = AdamState::new(&params);
    let targets = encode_labels(&train_set.labels, config.loss)?;
    let val_targets = encode_labels(&val_set.labels, config.loss)?;
    let mut order: Vec<usize> = (0..train_set.n_rows()).collect();
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(config.batch_size) {
            let x = train_set.values.select(Axis(0), batch);
            let t = targets.select(batch);
            let (l, grads) = model_backward(spec, &params, &x, &t)?;
            if !l.is_finite() {
                return Err(Error::Training {
                    epoch,
                    reason: format!("non-finite batch loss {l}"),
                });
            }
            total += l * batch.len() as f64;
            adam.step(&mut params, &grads, config.learning_rate);
        }
        let train_loss = total / train_set.n_rows() as f64;

        let val_logits = model_forward(spec, &params, &val_set.values)?;
        let val_loss = loss(&val_logits, &val_targets)?;
        if !val_loss.is_finite() {
            return Err(Error::Training {
                epoch,
                reason: format!("non-finite validation loss {val_loss}"),
            });
        }
        let (val_confusion, val_metrics) = evaluate(spec, &params, val_set)?;
        log::debug!(
            "epoch {epoch}: train loss {train_loss:.5}, val loss {val_loss:.5}, val acc {:.4}",
            val_metrics.accuracy
        );
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
            val_confusion,
            val_metrics,
        });
    }
    Ok(TrainOutcome { params, history })
}
