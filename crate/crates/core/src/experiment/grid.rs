use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, PartialConfig};
use super::derive_seed;
use super::pipeline::cmd_train;
use crate::error::{Error, Result};
use crate::metrics::Metrics;
use crate::nn::{LossKind, ModelKind};

/// Values to sweep. Absent axes take the single value from the base config.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridAxes {
    pub model: Option<Vec<ModelKind>>,
    pub loss: Option<Vec<LossKind>>,
    pub attack_samples: Option<Vec<usize>>,
    pub ratio: Option<Vec<f64>>,
    pub qubits: Option<Vec<usize>>,
    /// Replicate seeds. Each table row aggregates over these.
    pub seed: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub base: PartialConfig,
    pub axes: GridAxes,
}

impl GridSpec {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: GridSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let a = &self.axes;
        let lens = [
            ("model", a.model.as_ref().map(Vec::len)),
            ("loss", a.loss.as_ref().map(Vec::len)),
            ("attack_samples", a.attack_samples.as_ref().map(Vec::len)),
            ("ratio", a.ratio.as_ref().map(Vec::len)),
            ("qubits", a.qubits.as_ref().map(Vec::len)),
            ("seed", a.seed.as_ref().map(Vec::len)),
        ];
        for (name, len) in lens {
            if len == Some(0) {
                return Err(Error::Config(format!("grid axis `{name}` is empty")));
            }
        }
        Ok(())
    }
}

/// Position of a table row in the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coord {
    pub model: ModelKind,
    pub loss: LossKind,
    pub attack_samples: usize,
    pub ratio: f64,
    pub qubits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub coord: Coord,
    pub replicate_seed: u64,
    /// Seed handed to the run, derived from the replicate seed and the data
    /// coordinates only, so every model and loss sees the same data.
    pub run_seed: u64,
    pub metrics: Option<Metrics>,
    pub error: Option<String>,
    pub exit_code: i32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
}

impl MeanStd {
    fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        if values.is_empty() {
            return Self::default();
        }
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub coord: Coord,
    pub n_ok: usize,
    pub n_failed: usize,
    pub accuracy: MeanStd,
    pub recall: MeanStd,
    pub precision: MeanStd,
    pub f1: MeanStd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridOutcome {
    pub rows: Vec<GridRow>,
    pub cells: Vec<CellRecord>,
    /// Axes with more than one value, in table column order.
    pub swept: Vec<String>,
}

impl GridOutcome {
    pub fn n_failed(&self) -> usize {
        self.cells.iter().filter(|c| c.error.is_some()).count()
    }

    /// Exit code of the first failed cell, or 0.
    pub fn exit_code(&self) -> i32 {
        self.cells.iter().find(|c| c.error.is_some()).map_or(0, |c| c.exit_code)
    }

    fn varies(&self, axis: &str) -> bool {
        self.swept.iter().any(|s| s == axis)
    }

    /// Aligned table: Model, Attack samples, any other swept coordinate,
    /// then Accuracy, Recall, Precision and F1 in percent.
    pub fn to_table(&self) -> String {
        let multi_seed = self.rows.iter().any(|r| r.n_ok + r.n_failed > 1);
        let mut header = vec!["Model".to_string(), "Attack samples".to_string()];
        for (axis, title) in [("loss", "Loss"), ("ratio", "Ratio"), ("qubits", "Qubits")] {
            if self.varies(axis) {
                header.push(title.into());
            }
        }
        if multi_seed {
            header.push("Runs".into());
        }
        header.extend(["Accuracy", "Recall", "Precision", "F1"].map(String::from));

        let fmt = |m: &MeanStd, r: &GridRow| {
            if r.n_ok == 0 {
                "failed".to_string()
            } else if multi_seed {
                format!("{:.2} ± {:.2}", 100.0 * m.mean, 100.0 * m.std)
            } else {
                format!("{:.2}", 100.0 * m.mean)
            }
        };
        let mut body = Vec::new();
        for r in &self.rows {
            let c = &r.coord;
            let mut line = vec![
                match c.model {
                    ModelKind::Hfqnn => "H-FQNN".to_string(),
                    ModelKind::Fnn => "FNN".to_string(),
                },
                c.attack_samples.to_string(),
            ];
            if self.varies("loss") {
                line.push(c.loss.to_string());
            }
            if self.varies("ratio") {
                line.push(c.ratio.to_string());
            }
            if self.varies("qubits") {
                line.push(c.qubits.to_string());
            }
            if multi_seed {
                line.push(if r.n_failed > 0 {
                    format!("{}/{}", r.n_ok, r.n_ok + r.n_failed)
                } else {
                    r.n_ok.to_string()
                });
            }
            line.extend([
                fmt(&r.accuracy, r),
                fmt(&r.recall, r),
                fmt(&r.precision, r),
                fmt(&r.f1, r),
            ]);
            body.push(line);
        }

        let widths: Vec<usize> = (0..header.len())
            .map(|j| {
                body.iter()
                    .map(|l| l[j].chars().count())
                    .chain([header[j].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let render = |cells: &[String]| {
            let mut s = String::new();
            for (j, cell) in cells.iter().enumerate() {
                let pad = widths[j] - cell.chars().count();
                if j > 0 {
                    s.push_str("  ");
                }
                if j < 2 {
                    s.push_str(cell);
                    s.push_str(&" ".repeat(pad));
                } else {
                    s.push_str(&" ".repeat(pad));
                    s.push_str(cell);
                }
            }
            s.trim_end().to_string()
        };
        let mut out = String::new();
        let _ = writeln!(out, "{}", render(&header));
        let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        for line in &body {
            let _ = writeln!(out, "{}", render(line));
        }
        for c in self.cells.iter().filter(|c| c.error.is_some()) {
            let _ = writeln!(
                out,
                "failed: {} {} attack {} seed {}: {}",
                c.coord.model,
                c.coord.loss,
                c.coord.attack_samples,
                c.replicate_seed,
                c.error.as_deref().unwrap_or_default()
            );
        }
        out
    }

    /// One CSV per swept numeric axis (`attack_samples`, `ratio`, `qubits`),
    /// holding every row's coordinates with mean and std of each score.
    pub fn write_series(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        for axis in ["attack_samples", "ratio", "qubits"] {
            if !self.varies(axis) {
                continue;
            }
            let path = dir.join(format!("series_{axis}.csv"));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record([
                "model",
                "loss",
                "attack_samples",
                "ratio",
                "qubits",
                "runs",
                "accuracy_mean",
                "accuracy_std",
                "recall_mean",
                "recall_std",
                "precision_mean",
                "precision_std",
                "f1_mean",
                "f1_std",
            ])?;
            let mut rows: Vec<&GridRow> = self.rows.iter().filter(|r| r.n_ok > 0).collect();
            let key = |r: &GridRow| match axis {
                "attack_samples" => r.coord.attack_samples as f64,
                "ratio" => r.coord.ratio,
                _ => r.coord.qubits as f64,
            };
            // Stable sort keeps the remaining coordinates in sweep order.
            rows.sort_by(|a, b| {
                (a.coord.model as u8, a.coord.loss as u8)
                    .cmp(&(b.coord.model as u8, b.coord.loss as u8))
                    .then(key(a).total_cmp(&key(b)))
            });
            for r in rows {
                let c = &r.coord;
                let mut rec = vec![
                    c.model.to_string(),
                    c.loss.to_string(),
                    c.attack_samples.to_string(),
                    c.ratio.to_string(),
                    c.qubits.to_string(),
                    r.n_ok.to_string(),
                ];
                for m in [&r.accuracy, &r.recall, &r.precision, &r.f1] {
                    rec.push(m.mean.to_string());
                    rec.push(m.std.to_string());
                }
                w.write_record(&rec)?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

pub fn cell_seed(replicate_seed: u64, attack_samples: usize, ratio: f64) -> u64 {
    derive_seed(
        replicate_seed,
        &["cell", &attack_samples.to_string(), &ratio.to_bits().to_string()],
    )
}

fn cell_name(coord: &Coord, replicate_seed: u64) -> String {
    format!(
        "{}-{}-n{}-r{}-q{}-s{}",
        coord.model, coord.loss, coord.attack_samples, coord.ratio, coord.qubits, replicate_seed
    )
}

/// Runs every cell of the cartesian product in turn. A failing cell is
/// recorded and the grid carries on.
pub fn run_grid(spec: &GridSpec, overrides: &PartialConfig) -> Result<GridOutcome> {
    spec.validate()?;
    let mut base = ExperimentConfig::default();
    base.apply(&spec.base);
    base.apply(overrides);

    let a = &spec.axes;
    let models = a.model.clone().unwrap_or_else(|| vec![base.model]);
    let losses = a.loss.clone().unwrap_or_else(|| vec![base.loss]);
    let attacks = a.attack_samples.clone().unwrap_or_else(|| vec![base.attack_samples]);
    let ratios = a.ratio.clone().unwrap_or_else(|| vec![base.ratio]);
    let qubits = a.qubits.clone().unwrap_or_else(|| vec![base.qubits]);
    let seeds = a.seed.clone().unwrap_or_else(|| vec![base.seed]);

    let mut swept = Vec::new();
    for (name, n) in [
        ("model", models.len()),
        ("attack_samples", attacks.len()),
        ("loss", losses.len()),
        ("ratio", ratios.len()),
        ("qubits", qubits.len()),
        ("seed", seeds.len()),
    ] {
        if n > 1 {
            swept.push(name.to_string());
        }
    }

    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for &model in &models {
        for &attack_samples in &attacks {
            for &loss in &losses {
                for &ratio in &ratios {
                    for &q in &qubits {
                        let coord = Coord {
                            model,
                            loss,
                            attack_samples,
                            ratio,
                            qubits: q,
                        };
                        let mut ok = Vec::new();
                        let mut n_failed = 0;
                        for &replicate_seed in &seeds {
                            let run_seed = cell_seed(replicate_seed, attack_samples, ratio);
                            let config = ExperimentConfig {
                                model,
                                loss,
                                attack_samples,
                                ratio,
                                qubits: q,
                                seed: run_seed,
                                out: base
                                    .out
                                    .as_ref()
                                    .map(|d| d.join("cells").join(cell_name(&coord, replicate_seed))),
                                ..base.clone()
                            };
                            log::info!("grid cell {}", cell_name(&coord, replicate_seed));
                            let record = match cmd_train(&config) {
                                Ok(report) => {
                                    ok.push(report.test_metrics);
                                    CellRecord {
                                        coord,
                                        replicate_seed,
                                        run_seed,
                                        metrics: Some(report.test_metrics),
                                        error: None,
                                        exit_code: 0,
                                    }
                                }
                                Err(e) => {
                                    log::error!("grid cell {} failed: {e}", cell_name(&coord, replicate_seed));
                                    n_failed += 1;
                                    CellRecord {
                                        coord,
                                        replicate_seed,
                                        run_seed,
                                        metrics: None,
                                        error: Some(e.to_string()),
                                        exit_code: e.exit_code(),
                                    }
                                }
                            };
                            cells.push(record);
                        }
                        let stat = |f: fn(&Metrics) -> f64| MeanStd::of(&ok.iter().map(f).collect::<Vec<_>>());
                        rows.push(GridRow {
                            coord,
                            n_ok: ok.len(),
                            n_failed,
                            accuracy: stat(|m| m.accuracy),
                            recall: stat(|m| m.recall),
                            precision: stat(|m| m.precision),
                            f1: stat(|m| m.f1),
                        });
                    }
                }
            }
        }
    }
    Ok(GridOutcome { rows, cells, swept })
}

/// Reads a grid spec, runs it and, when an output directory is configured,
/// writes `grid.txt`, `grid.json` and the series files there.
pub fn cmd_grid(spec_path: &Path, overrides: &PartialConfig) -> Result<GridOutcome> {
    let spec = GridSpec::from_toml_file(spec_path)?;
    let outcome = run_grid(&spec, overrides)?;
    let out = overrides.out.clone().or_else(|| spec.base.out.clone());
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let txt = dir.join("grid.txt");
        std::fs::write(&txt, outcome.to_table()).map_err(|e| Error::io(&txt, e))?;
        let json = dir.join("grid.json");
        std::fs::write(&json, serde_json::to_string_pretty(&outcome)?).map_err(|e| Error::io(&json, e))?;
        outcome.write_series(&dir)?;
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> PartialConfig {
        PartialConfig {
            epochs: Some(2),
            qubits: Some(2),
            layers: Some(1),
            attack_samples: Some(20),
            batch_size: Some(32),
            ..Default::default()
        }
    }

    #[test]
    fn empty_axis_is_a_config_error() {
        let err = GridSpec::from_toml("[axes]\nqubits = []\n").unwrap_err();
        assert!(matches!(err, Error::Config(m) if m.contains("qubits")));
        assert!(GridSpec::from_toml("[axes]\ncolour = [1]\n").is_err());
    }

    #[test]
    fn model_by_attack_grid_has_four_rows_in_table_order() {
        let spec = GridSpec::from_toml(
            "[axes]\nmodel = [\"fnn\", \"hfqnn\"]\nattack_samples = [20, 30]\n",
        )
        .unwrap();
        let out = run_grid(&spec, &tiny()).unwrap();
        assert_eq!(out.rows.len(), 4);
        assert_eq!(out.n_failed(), 0);
        let table = out.to_table();
        let header = table.lines().next().unwrap();
        let cols: Vec<&str> = header.split("  ").map(str::trim).filter(|s| !s.is_empty()).collect();
        assert_eq!(cols, ["Model", "Attack samples", "Accuracy", "Recall", "Precision", "F1"]);
        assert_eq!(table.lines().count(), 6);
        // Both models see the same data for the same attack count.
        assert_eq!(out.cells[0].run_seed, out.cells[2].run_seed);
    }

    #[test]
    fn cells_do_not_depend_on_sweep_order() {
        let fwd = GridSpec::from_toml("[axes]\nqubits = [1, 2]\nseed = [3, 4]\n").unwrap();
        let rev = GridSpec::from_toml("[axes]\nqubits = [2, 1]\nseed = [4, 3]\n").unwrap();
        let mut cfg = tiny();
        cfg.model = Some(ModelKind::Fnn);
        let a = run_grid(&fwd, &cfg).unwrap();
        let b = run_grid(&rev, &cfg).unwrap();
        for cell in &a.cells {
            let twin = b
                .cells
                .iter()
                .find(|c| c.coord == cell.coord && c.replicate_seed == cell.replicate_seed)
                .unwrap();
            assert_eq!(twin, cell);
        }
        assert_eq!(a.rows[0].n_ok, 2);
        assert!(a.to_table().contains('±'));
    }

    #[test]
    fn failed_cells_are_recorded_and_grid_continues() {
        let spec = GridSpec::from_toml("[axes]\nattack_samples = [2, 20]\n").unwrap();
        let mut cfg = tiny();
        cfg.ratio = Some(1.0);
        let out = run_grid(&spec, &cfg).unwrap();
        assert_eq!(out.n_failed(), 1);
        assert_eq!(out.exit_code(), 2);
        assert_eq!(out.rows[1].n_ok, 1);
        assert!(out.to_table().contains("failed"));
    }

    #[test]
    fn qubit_sweep_writes_a_series() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.toml");
        std::fs::write(&path, "[base]\nmodel = \"hfqnn\"\n[axes]\nqubits = [1, 2, 3]\n").unwrap();
        let mut cfg = tiny();
        cfg.out = Some(dir.path().join("out"));
        let out = cmd_grid(&path, &cfg).unwrap();
        assert_eq!(out.rows.len(), 3);
        let series = std::fs::read_to_string(dir.path().join("out/series_qubits.csv")).unwrap();
        assert_eq!(series.lines().count(), 4);
        assert!(series.starts_with("model,loss,attack_samples,ratio,qubits"));
        assert!(dir.path().join("out/grid.txt").exists());
    }

    #[test]
    fn mean_std() {
        let m = MeanStd::of(&[1.0, 2.0, 3.0]);
        assert_eq!(m.mean, 2.0);
        assert!((m.std - 1.0).abs() < 1e-15);
        assert_eq!(MeanStd::of(&[5.0]).std, 0.0);
    }
}
