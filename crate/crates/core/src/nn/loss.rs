use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::Tensor2;
use crate::data::Targets;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LossKind {
    /// Elementwise sigmoid + binary cross-entropy against one-hot rows.
    #[serde(rename = "bce")]
    BceWithLogits,
    /// Softmax + negative log-likelihood against class indices.
    #[serde(rename = "ce")]
    CrossEntropy,
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::BceWithLogits => "bce",
            LossKind::CrossEntropy => "ce",
        })
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bce" | "bcewithlogits" | "bce_with_logits" => Ok(LossKind::BceWithLogits),
            "ce" | "crossentropy" | "cross_entropy" => Ok(LossKind::CrossEntropy),
            other => Err(Error::Config(format!("unknown loss {other:?} (expected bce or ce)"))),
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `-[t log σ(z) + (1 − t) log(1 − σ(z))]` without overflow.
fn bce_term(z: f64, t: f64) -> f64 {
    z.max(0.0) - z * t + (-z.abs()).exp().ln_1p()
}

fn check_logits(logits: &Tensor2, rows: usize) -> Result<()> {
    if logits.ncols() != 2 {
        return Err(Error::Shape(format!("expected 2 logits per row, got {}", logits.ncols())));
    }
    if logits.nrows() != rows {
        return Err(Error::Shape(format!(
            "{} logit rows for {rows} targets",
            logits.nrows()
        )));
    }
    if rows == 0 {
        return Err(Error::Data("loss of an empty batch".into()));
    }
    Ok(())
}

fn check_one_hot(targets: &Array2<f64>) -> Result<()> {
    for (i, row) in targets.rows().into_iter().enumerate() {
        let ok = row.len() == 2
            && ((row[0] == 1.0 && row[1] == 0.0) || (row[0] == 0.0 && row[1] == 1.0));
        if !ok {
            return Err(Error::Data(format!("target row {i} is not one-hot: {row}")));
        }
    }
    Ok(())
}

fn check_classes(classes: &[usize]) -> Result<()> {
    if let Some(i) = classes.iter().position(|&c| c > 1) {
        return Err(Error::Data(format!(
            "class index {} at row {i} is outside {{0, 1}}",
            classes[i]
        )));
    }
    Ok(())
}

/// Mean over all `B × 2` entries.
pub fn bce_with_logits_loss(logits: &Tensor2, onehot: &Array2<f64>) -> Result<f64> {
    check_logits(logits, onehot.nrows())?;
    check_one_hot(onehot)?;
    let total: f64 = logits
        .iter()
        .zip(onehot.iter())
        .map(|(&z, &t)| bce_term(z, t))
        .sum();
    Ok(total / logits.len() as f64)
}

fn log_softmax_at(row: [f64; 2], class: usize) -> f64 {
    let m = row[0].max(row[1]);
    (row[class] - m) - (-(row[0] - row[1]).abs()).exp().ln_1p()
}

/// Mean over rows of `-log softmax(z)[class]`.
pub fn cross_entropy_loss(logits: &Tensor2, classes: &[usize]) -> Result<f64> {
    check_logits(logits, classes.len())?;
    check_classes(classes)?;
    let total: f64 = logits
        .rows()
        .into_iter()
        .zip(classes)
        .map(|(r, &c)| -log_softmax_at([r[0], r[1]], c))
        .sum();
    Ok(total / classes.len() as f64)
}

pub fn loss(logits: &Tensor2, targets: &Targets) -> Result<f64> {
    match targets {
        Targets::OneHot(t) => bce_with_logits_loss(logits, t),
        Targets::Classes(c) => cross_entropy_loss(logits, c),
    }
}

/// Loss value and `dL/dlogits`.
pub fn loss_and_grad(logits: &Tensor2, targets: &Targets) -> Result<(f64, Tensor2)> {
    let value = loss(logits, targets)?;
    let grad = match targets {
        Targets::OneHot(t) => {
            let scale = 1.0 / logits.len() as f64;
            let mut g = logits.mapv(sigmoid);
            g.zip_mut_with(t, |p, &y| *p = (*p - y) * scale);
            g
        }
        Targets::Classes(c) => {
            let scale = 1.0 / c.len() as f64;
            let mut g = Array2::zeros(logits.raw_dim());
            for (i, (row, &class)) in logits.rows().into_iter().zip(c).enumerate() {
                for k in 0..2 {
                    let p = log_softmax_at([row[0], row[1]], k).exp();
                    g[[i, k]] = (p - f64::from(u8::from(k == class))) * scale;
                }
            }
            g
        }
    };
    Ok((value, grad))
}
