use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::metrics::{ConfusionMatrix, Metrics, POSITIVE_CLASS};
use crate::nn::EpochRecord;

pub const REPORT_FORMAT: &str = "adsb-hqnn-report";
pub const REPORT_VERSION: u32 = 1;

/// Package version plus the source revision when it was known at build time.
pub fn build_id() -> String {
    match option_env!("ADSB_HQNN_GIT_REV") {
        Some(rev) if !rev.is_empty() => format!("{}+{rev}", env!("CARGO_PKG_VERSION")),
        _ => env!("CARGO_PKG_VERSION").to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Train,
    Eval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    /// SHA-256 of the CSV file; absent for generated data.
    pub digest: Option<String>,
    pub rows_loaded: usize,
    pub rows_skipped: usize,
    pub sampled_normal: usize,
    pub sampled_attack: usize,
    /// Train, validation, test.
    pub split_sizes: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSummary {
    pub kept: Vec<String>,
    pub dropped: Vec<String>,
    /// Columns with zero variance on the training split.
    pub constant: Vec<String>,
}

/// Seconds spent in each stage. Wall-clock, so never reproducible.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub load: f64,
    pub prepare: f64,
    pub train: f64,
    pub evaluate: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format: String,
    pub version: u32,
    pub command: Command,
    pub build: String,
    pub config: ExperimentConfig,
    /// Seeds actually used by each stage, derived from `config.seed`.
    pub stage_seeds: StageSeeds,
    pub dataset: DatasetSummary,
    pub features: FeatureSummary,
    pub positive_class: u8,
    pub history: Vec<EpochRecord>,
    pub test_confusion: ConfusionMatrix,
    pub test_metrics: Metrics,
    pub timings: Timings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSeeds {
    pub synthetic: u64,
    pub sample: u64,
    pub split: u64,
    pub train: u64,
}

impl RunReport {
    pub(crate) fn new(
        command: Command,
        config: ExperimentConfig,
        stage_seeds: StageSeeds,
        dataset: DatasetSummary,
        features: FeatureSummary,
    ) -> Self {
        Self {
            format: REPORT_FORMAT.into(),
            version: REPORT_VERSION,
            command,
            build: build_id(),
            config,
            stage_seeds,
            dataset,
            features,
            positive_class: POSITIVE_CLASS,
            history: Vec::new(),
            test_confusion: ConfusionMatrix::default(),
            test_metrics: Metrics {
                accuracy: 0.0,
                precision: 0.0,
                recall: 0.0,
                f1: 0.0,
                undefined: Default::default(),
            },
            timings: Timings::default(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: RunReport = serde_json::from_str(text)?;
        if report.format != REPORT_FORMAT {
            return Err(Error::Data(format!("not a run report: format tag {:?}", report.format)));
        }
        if report.version != REPORT_VERSION {
            return Err(Error::Version {
                found: report.version,
                supported: REPORT_VERSION,
            });
        }
        Ok(report)
    }

    /// The report with timings zeroed: everything that must match exactly
    /// between two runs of the same recipe.
    pub fn canonical(&self) -> Self {
        Self {
            timings: Timings::default(),
            ..self.clone()
        }
    }

    pub fn canonical_json(&self) -> Result<String> {
        self.canonical().to_json()
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let m = &self.test_metrics;
        let cm = &self.test_confusion;
        let mut s = String::new();
        let _ = writeln!(s, "{:?} run, build {}", self.command, self.build);
        let _ = writeln!(s, "dataset      {}", c.dataset);
        let _ = writeln!(
            s,
            "model        {} ({} qubits/width, {} layers), loss {}",
            c.model, c.qubits, c.layers, c.loss
        );
        let _ = writeln!(
            s,
            "sampling     {} attack x ratio {} -> {} normal + {} attack",
            c.attack_samples, c.ratio, self.dataset.sampled_normal, self.dataset.sampled_attack
        );
        let [tr, va, te] = self.dataset.split_sizes;
        let _ = writeln!(s, "split        train {tr}, val {va}, test {te}");
        let _ = writeln!(
            s,
            "training     {} epochs, lr {}, batch {}, seed {}",
            c.epochs, c.learning_rate, c.batch_size, c.seed
        );
        let _ = writeln!(s, "features     {}", self.features.kept.join(", "));
        if !self.features.dropped.is_empty() {
            let _ = writeln!(s, "dropped      {}", self.features.dropped.join(", "));
        }
        if self.dataset.rows_skipped > 0 {
            let _ = writeln!(s, "skipped rows {}", self.dataset.rows_skipped);
        }
        if let Some(last) = self.history.last() {
            let _ = writeln!(
                s,
                "final epoch  train loss {:.6}, val loss {:.6}, val accuracy {:.2}%",
                last.train_loss,
                last.val_loss,
                100.0 * last.val_metrics.accuracy
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "test set (positive class = attack)");
        let _ = writeln!(s, "  accuracy   {:6.2}%", 100.0 * m.accuracy);
        let _ = writeln!(s, "  recall     {:6.2}%", 100.0 * m.recall);
        let _ = writeln!(s, "  precision  {:6.2}%", 100.0 * m.precision);
        let _ = writeln!(s, "  f1         {:6.2}%", 100.0 * m.f1);
        if m.undefined.any() {
            let _ = writeln!(s, "  (scores with a zero denominator are reported as 0)");
        }
        let _ = writeln!(s, "  confusion  tp {} fp {} fn {} tn {}", cm.true_pos, cm.false_pos, cm.false_neg, cm.true_neg);
        let t = &self.timings;
        let _ = writeln!(
            s,
            "\ntime         load {:.2}s, prepare {:.2}s, train {:.2}s, evaluate {:.2}s, total {:.2}s",
            t.load, t.prepare, t.train, t.evaluate, t.total
        );
        s
    }

    /// Writes `report.json` and `report.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let json = dir.join("report.json");
        std::fs::write(&json, self.to_json()?).map_err(|e| Error::io(&json, e))?;
        let txt = dir.join("report.txt");
        std::fs::write(&txt, self.to_text()).map_err(|e| Error::io(&txt, e))?;
        Ok(())
    }
}
