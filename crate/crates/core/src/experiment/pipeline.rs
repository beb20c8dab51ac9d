use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::ExperimentConfig;
use super::derive_seed;
use super::report::{Command, DatasetSummary, FeatureSummary, RunReport, StageSeeds};
use crate::data::cache::{self, CachedSplit, SplitCacheKey, CACHE_VERSION};
use crate::data::{
    generate_synthetic, load_csv, sample_stratified, select_features, split_70_20_10, FeatureMatrix,
    SplitSet, Standardizer, ATTACK, NORMAL,
};
use crate::error::{Error, Result, StageExt};
use crate::nn::checkpoint::Checkpoint;
use crate::nn::{evaluate, train, ModelKind, ModelSpec};
use crate::vqc::CircuitSpec;

pub const REPORT_FILE: &str = "report.json";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";

pub fn stage_seeds(seed: u64) -> StageSeeds {
    StageSeeds {
        synthetic: derive_seed(seed, &["synthetic"]),
        sample: derive_seed(seed, &["sample"]),
        split: derive_seed(seed, &["split"]),
        train: derive_seed(seed, &["train"]),
    }
}

pub fn model_spec(config: &ExperimentConfig, n_features: usize) -> Result<ModelSpec> {
    match config.model {
        ModelKind::Hfqnn => ModelSpec::hfqnn(n_features, CircuitSpec::new(config.qubits, config.layers)?),
        ModelKind::Fnn => ModelSpec::fnn(n_features, config.qubits),
    }
}

/// Selected, sampled and split data, before standardization.
struct Prepared {
    rows_loaded: usize,
    rows_skipped: usize,
    digest: Option<String>,
    kept: Vec<String>,
    dropped: Vec<String>,
    split: SplitSet,
    load_secs: f64,
    prepare_secs: f64,
}

impl Prepared {
    fn summary(&self) -> DatasetSummary {
        let all = [&self.split.train, &self.split.val, &self.split.test];
        DatasetSummary {
            digest: self.digest.clone(),
            rows_loaded: self.rows_loaded,
            rows_skipped: self.rows_skipped,
            sampled_normal: all.iter().map(|m| m.count_label(NORMAL)).sum(),
            sampled_attack: all.iter().map(|m| m.count_label(ATTACK)).sum(),
            split_sizes: all.map(|m| m.n_rows()),
        }
    }
}

fn load(config: &ExperimentConfig, seeds: &StageSeeds) -> Result<(FeatureMatrix, usize)> {
    if config.is_synthetic() {
        let plan = config.plan(seeds.sample);
        let records = generate_synthetic(plan.n_normal(), plan.n_attack, seeds.synthetic);
        return Ok((FeatureMatrix::from_records(&records)?, 0));
    }
    let loaded = load_csv(&config.dataset)?;
    if loaded.skipped > 0 {
        log::warn!("{}: skipped {} malformed rows", config.dataset, loaded.skipped);
    }
    Ok((FeatureMatrix::from_records(&loaded.records)?, loaded.skipped))
}

fn prepare(config: &ExperimentConfig, seeds: &StageSeeds) -> Result<Prepared> {
    let start = Instant::now();
    let plan = config.plan(seeds.sample);
    let digest = if config.is_synthetic() {
        None
    } else {
        Some(cache::file_digest(Path::new(&config.dataset)).stage("load")?)
    };
    let key = SplitCacheKey {
        dataset: digest.clone().unwrap_or_else(|| {
            format!(
                "synthetic:{}:{}:{}",
                plan.n_normal(),
                plan.n_attack,
                seeds.synthetic
            )
        }),
        plan,
        split_seed: seeds.split,
        threshold: config.threshold,
    };
    if let Some(dir) = &config.cache_dir {
        if let Some(hit) = cache::load(dir, &key).stage("read cache")? {
            log::info!("using cached split {}", cache::cache_path(dir, &key).display());
            return Ok(Prepared {
                rows_loaded: hit.rows_loaded,
                rows_skipped: hit.rows_skipped,
                digest,
                kept: hit.kept,
                dropped: hit.dropped,
                split: hit.split,
                load_secs: start.elapsed().as_secs_f64(),
                prepare_secs: 0.0,
            });
        }
    }

    let (features, rows_skipped) = load(config, seeds).stage("load")?;
    let rows_loaded = features.n_rows();
    let load_secs = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let selection = select_features(&features, config.threshold).stage("select features")?;
    log::info!(
        "kept {:?}, dropped {:?}",
        selection.kept,
        selection.dropped
    );
    let sampled = sample_stratified(&selection.features, &plan).stage("sample")?;
    let split = split_70_20_10(&sampled, seeds.split).stage("split")?;
    if let Some(dir) = &config.cache_dir {
        let entry = CachedSplit {
            version: CACHE_VERSION,
            key,
            rows_loaded,
            rows_skipped,
            kept: selection.kept.clone(),
            dropped: selection.dropped.clone(),
            split: split.clone(),
        };
        cache::store(dir, &entry).stage("write cache")?;
    }
    Ok(Prepared {
        rows_loaded,
        rows_skipped,
        digest,
        kept: selection.kept,
        dropped: selection.dropped,
        split,
        load_secs,
        prepare_secs: start.elapsed().as_secs_f64(),
    })
}

/// Full pipeline: load, select features, sample, split, standardize,
/// train, then score the test split. Writes `report.json`, `report.txt` and
/// `checkpoint.json` when `config.out` is set.
pub fn cmd_train(config: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    config.validate().stage("configure")?;
    let seeds = stage_seeds(config.seed);
    let prepared = prepare(config, &seeds)?;

    let t = Instant::now();
    let standardizer = Standardizer::fit(&prepared.split.train).stage("standardize")?;
    let scale = |m: &FeatureMatrix| standardizer.transform(m).stage("standardize");
    let (train_set, val_set, test_set) = (
        scale(&prepared.split.train)?,
        scale(&prepared.split.val)?,
        scale(&prepared.split.test)?,
    );
    let spec = model_spec(config, prepared.kept.len()).stage("build model")?;
    let prepare_secs = prepared.prepare_secs + t.elapsed().as_secs_f64();

    let t = Instant::now();
    let outcome = train(&spec, &config.train_config(seeds.train), &train_set, &val_set).stage("train")?;
    let train_secs = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (confusion, metrics) = evaluate(&spec, &outcome.params, &test_set).stage("evaluate")?;
    let evaluate_secs = t.elapsed().as_secs_f64();

    let mut report = RunReport::new(
        Command::Train,
        config.clone(),
        seeds,
        prepared.summary(),
        FeatureSummary {
            kept: prepared.kept.clone(),
            dropped: prepared.dropped.clone(),
            constant: standardizer.constant_columns().to_vec(),
        },
    );
    report.history = outcome.history;
    report.test_confusion = confusion;
    report.test_metrics = metrics;
    report.timings.load = prepared.load_secs;
    report.timings.prepare = prepare_secs;
    report.timings.train = train_secs;
    report.timings.evaluate = evaluate_secs;
    report.timings.total = start.elapsed().as_secs_f64();

    if let Some(out) = &config.out {
        let recipe = serde_json::to_value(config).stage("write")?;
        let checkpoint = Checkpoint::new(spec, outcome.params, seeds.train, prepared.kept)
            .stage("write")?
            .with_standardizer(standardizer)
            .with_recipe(recipe);
        report.write(out).stage("write")?;
        checkpoint.save(&out.join(CHECKPOINT_FILE)).stage("write")?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Default)]
pub struct EvalOptions {
    pub checkpoint: PathBuf,
    /// Defaults to the dataset recorded in the checkpoint.
    pub dataset: Option<String>,
    /// Defaults to the seed recorded in the checkpoint.
    pub seed: Option<u64>,
    /// When given, the checkpoint must hold this kind of model.
    pub model: Option<ModelKind>,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

/// Scores a saved model on the test split of a freshly prepared dataset,
/// using the standardizer saved with the model.
pub fn cmd_eval(options: &EvalOptions) -> Result<RunReport> {
    let start = Instant::now();
    let checkpoint = Checkpoint::load(&options.checkpoint).stage("load checkpoint")?;
    if let Some(kind) = options.model {
        if kind != checkpoint.spec.kind {
            return Err(Error::Kind {
                expected: kind.to_string(),
                found: checkpoint.spec.kind.to_string(),
            })
            .stage("load checkpoint");
        }
    }
    let recipe = checkpoint
        .recipe
        .clone()
        .ok_or_else(|| Error::Config("checkpoint carries no run recipe".into()))
        .stage("load checkpoint")?;
    let mut config: ExperimentConfig = serde_json::from_value(recipe).stage("load checkpoint")?;
    if let Some(dataset) = &options.dataset {
        config.dataset.clone_from(dataset);
    }
    if let Some(seed) = options.seed {
        config.seed = seed;
    }
    config.out.clone_from(&options.out);
    config.cache_dir.clone_from(&options.cache_dir);
    config.validate().stage("configure")?;

    let seeds = stage_seeds(config.seed);
    let prepared = prepare(&config, &seeds)?;
    let spec = &checkpoint.spec;
    if prepared.kept.len() != spec.n_features {
        return Err(Error::Shape(format!(
            "checkpoint expects {} features, dataset provides {}",
            spec.n_features,
            prepared.kept.len()
        )))
        .stage("match features");
    }
    if prepared.kept != checkpoint.feature_names {
        return Err(Error::Shape(format!(
            "checkpoint features [{}] differ from dataset features [{}]",
            checkpoint.feature_names.join(", "),
            prepared.kept.join(", ")
        )))
        .stage("match features");
    }

    let t = Instant::now();
    let standardizer = match &checkpoint.standardizer {
        Some(s) => s.clone(),
        None => Standardizer::fit(&prepared.split.train).stage("standardize")?,
    };
    let test_set = standardizer.transform(&prepared.split.test).stage("standardize")?;
    let prepare_secs = prepared.prepare_secs + t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (confusion, metrics) = evaluate(spec, &checkpoint.params, &test_set).stage("evaluate")?;

    let mut report = RunReport::new(
        Command::Eval,
        config.clone(),
        StageSeeds {
            train: checkpoint.seed,
            ..seeds
        },
        prepared.summary(),
        FeatureSummary {
            kept: prepared.kept.clone(),
            dropped: prepared.dropped.clone(),
            constant: standardizer.constant_columns().to_vec(),
        },
    );
    report.test_confusion = confusion;
    report.test_metrics = metrics;
    report.timings.load = prepared.load_secs;
    report.timings.prepare = prepare_secs;
    report.timings.evaluate = t.elapsed().as_secs_f64();
    report.timings.total = start.elapsed().as_secs_f64();
    if let Some(out) = &config.out {
        report.write(out).stage("write")?;
    }
    Ok(report)
}
