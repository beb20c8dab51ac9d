use log::warn;
use ndarray::Axis;
use serde::{Deserialize, Serialize};

use super::FeatureMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub mean: f64,
    /// Population standard deviation; 1 for constant columns.
    pub std: f64,
}

/// Per-column z-score transform. Fit on the training split only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    stats: Option<Vec<ColumnStats>>,
    #[serde(default)]
    constant_columns: Vec<String>,
}

impl Standardizer {
    /// A standardizer with no statistics; transforming with it is an error.
    pub fn unfitted() -> Self {
        Self::default()
    }

    pub fn fit(train: &FeatureMatrix) -> Result<Self> {
        if train.n_rows() == 0 {
            return Err(Error::Data("cannot fit a standardizer on zero rows".into()));
        }
        let mut constant_columns = Vec::new();
        let stats = train
            .values
            .axis_iter(Axis(1))
            .zip(&train.feature_names)
            .map(|(col, name)| {
                let mean = col.mean().expect("nonempty column");
                let std = col.std(0.0);
                if std > 0.0 && std.is_finite() {
                    ColumnStats { mean, std }
                } else {
                    warn!("column {name} has zero variance; scaling by 1");
                    constant_columns.push(name.clone());
                    ColumnStats { mean, std: 1.0 }
                }
            })
            .collect();
        Ok(Self {
            stats: Some(stats),
            constant_columns,
        })
    }

    pub fn is_fitted(&self) -> bool {
        self.stats.is_some()
    }

    pub fn stats(&self) -> Option<&[ColumnStats]> {
        self.stats.as_deref()
    }

    /// Columns that had zero variance at fit time.
    pub fn constant_columns(&self) -> &[String] {
        &self.constant_columns
    }

    fn fitted_for(&self, m: &FeatureMatrix) -> Result<&[ColumnStats]> {
        let stats = self
            .stats
            .as_deref()
            .ok_or_else(|| Error::State("standardizer applied before fitting".into()))?;
        if stats.len() != m.n_features() {
            return Err(Error::Shape(format!(
                "standardizer fitted on {} features, data has {}",
                stats.len(),
                m.n_features()
            )));
        }
        Ok(stats)
    }

    /// `x' = (x − μ) / σ` per column.
    pub fn transform(&self, m: &FeatureMatrix) -> Result<FeatureMatrix> {
        let stats = self.fitted_for(m)?;
        let mut out = m.clone();
        for (mut col, s) in out.values.axis_iter_mut(Axis(1)).zip(stats) {
            col.mapv_inplace(|x| (x - s.mean) / s.std);
        }
        Ok(out)
    }

    pub fn inverse_transform(&self, m: &FeatureMatrix) -> Result<FeatureMatrix> {
        let stats = self.fitted_for(m)?;
        let mut out = m.clone();
        for (mut col, s) in out.values.axis_iter_mut(Axis(1)).zip(stats) {
            col.mapv_inplace(|x| x * s.std + s.mean);
        }
        Ok(out)
    }
}
