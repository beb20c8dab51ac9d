use log::warn;
use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use super::FeatureMatrix;
use crate::error::{Error, Result};

/// Identifier column that never reaches the models.
const IDENTIFIER_COLUMN: &str = "icao24";

/// Pearson correlations between every pair of columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub feature_names: Vec<String>,
    pub values: Array2<f64>,
    /// Zero-variance columns; their off-diagonal correlations are 0.
    pub constant_columns: Vec<String>,
}

pub fn correlation_matrix(features: &FeatureMatrix) -> Result<CorrelationMatrix> {
    let n = features.n_rows();
    if n < 2 {
        return Err(Error::Data(format!(
            "correlation needs at least 2 rows, got {n}"
        )));
    }
    let f = features.n_features();
    let mean = features
        .values
        .mean_axis(Axis(0))
        .expect("at least two rows");
    let centered = &features.values - &mean;
    let cov = centered.t().dot(&centered);
    let std: Vec<f64> = (0..f).map(|j| cov[[j, j]].sqrt()).collect();
    let constant: Vec<bool> = std.iter().map(|&s| s == 0.0 || !s.is_finite()).collect();

    let mut values = Array2::zeros((f, f));
    for i in 0..f {
        values[[i, i]] = 1.0;
        for j in i + 1..f {
            let r = if constant[i] || constant[j] {
                0.0
            } else {
                (cov[[i, j]] / (std[i] * std[j])).clamp(-1.0, 1.0)
            };
            values[[i, j]] = r;
            values[[j, i]] = r;
        }
    }
    let constant_columns: Vec<String> = constant
        .iter()
        .zip(&features.feature_names)
        .filter(|(&c, _)| c)
        .map(|(_, name)| name.clone())
        .collect();
    if !constant_columns.is_empty() {
        warn!("zero-variance column(s): {}", constant_columns.join(", "));
    }
    Ok(CorrelationMatrix {
        feature_names: features.feature_names.clone(),
        values,
        constant_columns,
    })
}

/// Outcome of correlation pruning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelection {
    pub features: FeatureMatrix,
    pub kept: Vec<String>,
    pub dropped: Vec<String>,
}

/// Drops the identifier column, then for every pair `(i, j)` with `i < j`
/// whose absolute correlation reaches `threshold`, drops column `j`.
pub fn select_features(features: &FeatureMatrix, threshold: f64) -> Result<FeatureSelection> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Config(format!(
            "correlation threshold {threshold} outside (0, 1]"
        )));
    }
    let mut dropped = Vec::new();
    let candidates: Vec<usize> = (0..features.n_features())
        .filter(|&j| {
            let is_id = features.feature_names[j].eq_ignore_ascii_case(IDENTIFIER_COLUMN);
            if is_id {
                dropped.push(features.feature_names[j].clone());
            }
            !is_id
        })
        .collect();
    if candidates.is_empty() {
        return Err(Error::Config("no features left after dropping the identifier".into()));
    }
    let reduced = features.select_columns(&candidates);
    let corr = correlation_matrix(&reduced)?;

    let f = reduced.n_features();
    let mut keep = vec![true; f];
    #[allow(clippy::needless_range_loop)]
    for i in 0..f {
        if !keep[i] {
            continue;
        }
        for j in i + 1..f {
            if keep[j] && corr.values[[i, j]].abs() >= threshold {
                keep[j] = false;
            }
        }
    }
    let kept_idx: Vec<usize> = (0..f).filter(|&j| keep[j]).collect();
    dropped.extend((0..f).filter(|&j| !keep[j]).map(|j| reduced.feature_names[j].clone()));
    let out = reduced.select_columns(&kept_idx);
    Ok(FeatureSelection {
        kept: out.feature_names.clone(),
        features: out,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FeatureMatrix;
    use ndarray::{array, Array2};

    fn matrix(values: Array2<f64>, names: &[&str]) -> FeatureMatrix {
        let n = values.nrows();
        FeatureMatrix::new(values, names.iter().map(|s| s.to_string()).collect(), vec![0; n])
            .unwrap()
    }

    #[test]
    fn perfect_and_zero_correlation() {
        let x = [1.0, 2.0, 4.0, 7.0];
        let mut v = Array2::zeros((4, 4));
        for (i, &xi) in x.iter().enumerate() {
            v[[i, 0]] = xi;
            v[[i, 1]] = 2.0 * xi + 3.0;
        }
        // Orthogonal ±1 columns.
        v.column_mut(2).assign(&array![1.0, 1.0, -1.0, -1.0]);
        v.column_mut(3).assign(&array![1.0, -1.0, 1.0, -1.0]);
        let c = correlation_matrix(&matrix(v, &["x", "y", "a", "b"])).unwrap();
        assert_eq!(c.values[[0, 0]], 1.0);
        assert!((c.values[[0, 1]] - 1.0).abs() < 1e-12);
        assert!(c.values[[2, 3]].abs() < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                assert!((c.values[[i, j]] - c.values[[j, i]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_column_is_flagged() {
        let v = array![[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]];
        let c = correlation_matrix(&matrix(v, &["a", "k"])).unwrap();
        assert_eq!(c.constant_columns, vec!["k"]);
        assert_eq!(c.values[[0, 1]], 0.0);
        assert_eq!(c.values[[1, 1]], 1.0);
    }

    #[test]
    fn needs_two_rows() {
        let v = array![[1.0, 2.0]];
        assert!(matches!(
            correlation_matrix(&matrix(v, &["a", "b"])),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn later_collinear_column_is_dropped() {
        let v = array![
            [1.0, 0.3, 2.0, 9.0],
            [2.0, -0.1, 4.0, 1.0],
            [3.0, 0.8, 6.0, 4.0],
            [4.0, 0.0, 8.0, 2.0]
        ];
        let sel = select_features(&matrix(v, &["x", "n", "x2", "m"]), 0.9).unwrap();
        assert_eq!(sel.kept, vec!["x", "n", "m"]);
        assert_eq!(sel.dropped, vec!["x2"]);
    }

    #[test]
    fn threshold_one_only_drops_identifier() {
        let v = array![[1.0, 7.0, 0.3], [2.0, 8.0, -0.1], [3.0, 1.0, 0.8], [4.0, 2.0, 0.0]];
        let sel = select_features(&matrix(v, &["time", "icao24", "lat"]), 1.0).unwrap();
        assert_eq!(sel.kept, vec!["time", "lat"]);
        assert_eq!(sel.dropped, vec!["icao24"]);
    }

    #[test]
    fn invalid_threshold_and_empty_result() {
        let v = array![[1.0], [2.0]];
        assert!(matches!(
            select_features(&matrix(v.clone(), &["a"]), 0.0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            select_features(&matrix(v, &["icao24"]), 0.9),
            Err(Error::Config(_))
        ));
    }
}
