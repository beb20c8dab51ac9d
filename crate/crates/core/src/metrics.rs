//! Binary confusion matrix and the derived classification scores.
//!
//! The positive class is `1` (attack). Precision, recall and F1 are reported
//! for that class only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which class the precision/recall/F1 figures describe.
pub const POSITIVE_CLASS: u8 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    #[serde(rename = "tp")]
    pub true_pos: u64,
    #[serde(rename = "tn")]
    pub true_neg: u64,
    #[serde(rename = "fp")]
    pub false_pos: u64,
    #[serde(rename = "fn")]
    pub false_neg: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }

    /// Counts from predicted and true labels, both in `{0, 1}`.
    pub fn from_labels(pred: &[u8], truth: &[u8]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::Data(format!(
                "{} predictions for {} labels",
                pred.len(),
                truth.len()
            )));
        }
        let mut cm = Self::default();
        for (i, (&p, &t)) in pred.iter().zip(truth).enumerate() {
            match (p, t) {
                (1, 1) => cm.true_pos += 1,
                (0, 0) => cm.true_neg += 1,
                (1, 0) => cm.false_pos += 1,
                (0, 1) => cm.false_neg += 1,
                _ => {
                    return Err(Error::Data(format!(
                        "label pair ({p}, {t}) at position {i} is not binary"
                    )))
                }
            }
        }
        Ok(cm)
    }

    pub fn derive(&self) -> Result<Metrics> {
        let total = self.total();
        if total == 0 {
            return Err(Error::Data("confusion matrix is empty".into()));
        }
        let ratio = |num: u64, den: u64| {
            if den == 0 {
                None
            } else {
                Some(num as f64 / den as f64)
            }
        };
        let accuracy = (self.true_pos + self.true_neg) as f64 / total as f64;
        let precision = ratio(self.true_pos, self.true_pos + self.false_pos);
        let recall = ratio(self.true_pos, self.true_pos + self.false_neg);
        let f1 = match (precision, recall) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
            _ => None,
        };
        Ok(Metrics {
            accuracy,
            precision: precision.unwrap_or(0.0),
            recall: recall.unwrap_or(0.0),
            f1: f1.unwrap_or(0.0),
            undefined: Undefined {
                precision: precision.is_none(),
                recall: recall.is_none(),
                f1: f1.is_none(),
            },
        })
    }
}

pub fn confusion(pred: &[u8], truth: &[u8]) -> Result<ConfusionMatrix> {
    ConfusionMatrix::from_labels(pred, truth)
}

/// Which scores hit a zero denominator and were reported as 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Undefined {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
}

impl Undefined {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.f1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub undefined: Undefined,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cm(tp: u64, tn: u64, fp: u64, fn_: u64) -> ConfusionMatrix {
        ConfusionMatrix {
            true_pos: tp,
            true_neg: tn,
            false_pos: fp,
            false_neg: fn_,
        }
    }

    #[test]
    fn counting_examples() {
        assert_eq!(confusion(&[1, 1, 0, 0], &[1, 1, 0, 0]).unwrap(), cm(2, 2, 0, 0));
        assert_eq!(confusion(&[1, 0], &[0, 1]).unwrap(), cm(0, 0, 1, 1));
        assert!(matches!(confusion(&[1], &[1, 0]), Err(Error::Data(_))));
        assert!(matches!(confusion(&[2], &[1]), Err(Error::Data(_))));
    }

    #[test]
    fn perfect_classifier() {
        let m = cm(2, 2, 0, 0).derive().unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall, m.f1), (1.0, 1.0, 1.0, 1.0));
        assert!(!m.undefined.any());
    }

    #[test]
    fn no_positives_anywhere() {
        let m = cm(0, 10, 0, 0).derive().unwrap();
        assert_eq!(m.accuracy, 1.0);
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
        assert!(m.undefined.precision && m.undefined.recall && m.undefined.f1);
    }

    #[test]
    fn substituted_values() {
        let m = cm(90, 80, 10, 20).derive().unwrap();
        assert!((m.accuracy - 0.85).abs() < 1e-15);
        assert!((m.precision - 0.9).abs() < 1e-15);
        assert!((m.recall - 90.0 / 110.0).abs() < 1e-15);
        assert!((m.recall - 0.81818).abs() < 1e-5);
        assert!((m.f1 - 0.85714).abs() < 1e-5);
    }

    #[test]
    fn empty_matrix_is_an_error() {
        assert!(matches!(cm(0, 0, 0, 0).derive(), Err(Error::Data(_))));
    }

    #[test]
    fn serde_uses_short_names() {
        let s = serde_json::to_string(&cm(1, 2, 3, 4)).unwrap();
        assert_eq!(s, r#"{"tp":1,"tn":2,"fp":3,"fn":4}"#);
    }

    proptest! {
        #[test]
        fn f1_lies_between_precision_and_recall(tp in 0u64..50, tn in 0u64..50, fp in 0u64..50, fn_ in 0u64..50) {
            prop_assume!(tp + tn + fp + fn_ > 0);
            let m = cm(tp, tn, fp, fn_).derive().unwrap();
            for v in [m.accuracy, m.precision, m.recall, m.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            if !m.undefined.precision && !m.undefined.recall && !m.undefined.f1 {
                prop_assert!(m.f1 <= m.precision.max(m.recall) + 1e-12);
                prop_assert!(m.f1 >= m.precision.min(m.recall) - 1e-12);
            }
        }

        #[test]
        fn swapping_roles_transposes_errors(pairs in prop::collection::vec((0u8..2, 0u8..2), 1..100)) {
            let (p, t): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
            let a = confusion(&p, &t).unwrap();
            let b = confusion(&t, &p).unwrap();
            prop_assert_eq!(a.false_pos, b.false_neg);
            prop_assert_eq!(a.false_neg, b.false_pos);
            prop_assert_eq!(a.derive().unwrap().accuracy, b.derive().unwrap().accuracy);
        }
    }
}
