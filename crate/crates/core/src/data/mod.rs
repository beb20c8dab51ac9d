//! Dataset ingestion and preprocessing.
//!
//! The pipeline is: [`load_csv`] (or [`generate_synthetic`]) →
//! [`FeatureMatrix::from_records`] → [`select_features`] →
//! [`sample_stratified`] → [`split_70_20_10`] → [`Standardizer`] fitted on
//! the training split → [`encode_labels`].

pub mod cache;
mod ingest;
mod sampling;
mod selection;
mod split;
mod standardize;
pub mod synthetic;

pub use ingest::{load_csv, read_csv, CsvLoad};
pub use sampling::{sample_stratified, SamplingPlan};
pub use selection::{correlation_matrix, select_features, CorrelationMatrix, FeatureSelection};
pub use split::{split_70_20_10, SplitSet};
pub use standardize::{ColumnStats, Standardizer};
pub use synthetic::{generate_separable, generate_synthetic, SyntheticConfig};

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::LossKind;

pub const NORMAL: u8 = 0;
pub const ATTACK: u8 = 1;

/// One ADS-B state row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightRecord {
    /// UNIX seconds.
    pub time: f64,
    pub icao24: String,
    pub lat: f64,
    pub lon: f64,
    /// m/s
    pub velocity: f64,
    /// degrees
    pub heading: f64,
    /// meters
    pub baroaltitude: f64,
    /// meters
    pub geoaltitude: f64,
    pub label: u8,
}

/// Column order used when records become a matrix.
///
/// Correlation pruning drops the later column of a correlated pair, so the
/// geometric altitude sits ahead of the barometric one.
pub const RECORD_COLUMNS: [&str; 8] = [
    "time",
    "icao24",
    "lat",
    "lon",
    "velocity",
    "heading",
    "geoaltitude",
    "baroaltitude",
];

/// Rows of numeric features with one binary label per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub values: Array2<f64>,
    pub feature_names: Vec<String>,
    pub labels: Vec<u8>,
}

impl FeatureMatrix {
    pub fn new(values: Array2<f64>, feature_names: Vec<String>, labels: Vec<u8>) -> Result<Self> {
        if values.nrows() != labels.len() {
            return Err(Error::Shape(format!(
                "{} rows but {} labels",
                values.nrows(),
                labels.len()
            )));
        }
        if values.ncols() != feature_names.len() {
            return Err(Error::Shape(format!(
                "{} columns but {} feature names",
                values.ncols(),
                feature_names.len()
            )));
        }
        if let Some(l) = labels.iter().find(|&&l| l > ATTACK) {
            return Err(Error::Data(format!("label {l} is not 0 or 1")));
        }
        Ok(Self {
            values,
            feature_names,
            labels,
        })
    }

    /// Projects records onto [`RECORD_COLUMNS`]. The ICAO address becomes
    /// its hexadecimal value (0 when unparsable).
    pub fn from_records(records: &[FlightRecord]) -> Result<Self> {
        let mut values = Array2::zeros((records.len(), RECORD_COLUMNS.len()));
        for (mut row, r) in values.axis_iter_mut(Axis(0)).zip(records) {
            let icao = u32::from_str_radix(r.icao24.trim(), 16).unwrap_or(0) as f64;
            let cells = [
                r.time,
                icao,
                r.lat,
                r.lon,
                r.velocity,
                r.heading,
                r.geoaltitude,
                r.baroaltitude,
            ];
            for (dst, src) in row.iter_mut().zip(cells) {
                *dst = src;
            }
        }
        Self::new(
            values,
            RECORD_COLUMNS.iter().map(|s| s.to_string()).collect(),
            records.iter().map(|r| r.label).collect(),
        )
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            values: self.values.select(Axis(0), rows),
            feature_names: self.feature_names.clone(),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self {
            values: self.values.select(Axis(1), cols),
            feature_names: cols.iter().map(|&j| self.feature_names[j].clone()).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Row indices carrying `label`, in row order.
    pub fn rows_with_label(&self, label: u8) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn count_label(&self, label: u8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

/// Training targets in the layout each loss expects.
#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    /// `[N, 2]`, row `[1, 0]` for class 0 and `[0, 1]` for class 1.
    OneHot(Array2<f64>),
    /// Class indices.
    Classes(Vec<usize>),
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::OneHot(t) => t.nrows(),
            Targets::Classes(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn select(&self, rows: &[usize]) -> Targets {
        match self {
            Targets::OneHot(t) => Targets::OneHot(t.select(Axis(0), rows)),
            Targets::Classes(c) => Targets::Classes(rows.iter().map(|&i| c[i]).collect()),
        }
    }

    /// Class index per row (argmax for one-hot rows).
    pub fn classes(&self) -> Vec<usize> {
        match self {
            Targets::OneHot(t) => t
                .rows()
                .into_iter()
                .map(|r| usize::from(r[1] > r[0]))
                .collect(),
            Targets::Classes(c) => c.clone(),
        }
    }
}

pub fn encode_labels(labels: &[u8], loss: LossKind) -> Result<Targets> {
    if let Some(i) = labels.iter().position(|&l| l > ATTACK) {
        return Err(Error::Data(format!(
            "label {} at row {i} is not 0 or 1",
            labels[i]
        )));
    }
    Ok(match loss {
        LossKind::BceWithLogits => {
            let mut t = Array2::zeros((labels.len(), 2));
            for (i, &l) in labels.iter().enumerate() {
                t[[i, l as usize]] = 1.0;
            }
            Targets::OneHot(t)
        }
        LossKind::CrossEntropy => Targets::Classes(labels.iter().map(|&l| l as usize).collect()),
    })
}
