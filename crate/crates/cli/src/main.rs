use std::path::PathBuf;
use std::process::ExitCode;

use adsb_hqnn::experiment::{cmd_eval, cmd_grid, cmd_train, EvalOptions, ExperimentConfig, PartialConfig};
use adsb_hqnn::nn::{LossKind, ModelKind};
use adsb_hqnn::Error;
use clap::{Args, Parser, Subcommand};

/// Train and evaluate hybrid quantum-classical and classical anomaly
/// detectors on ADS-B flight records.
#[derive(Parser)]
#[command(name = "adsb-hqnn", version)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full pipeline once and write report and checkpoint.
    Train {
        #[command(flatten)]
        run: RunFlags,
        /// TOML file with settings; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Score a saved checkpoint on a freshly prepared split.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        /// CSV path or `synthetic`; defaults to the dataset used in training.
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Expected model kind; a checkpoint of another kind is rejected.
        #[arg(long)]
        model: Option<ModelKind>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Run every cell of a grid file and print a summary table.
    Grid {
        /// TOML file with optional `[base]` settings and `[axes]` value lists.
        spec: PathBuf,
        /// Settings applied over the grid's `[base]` section.
        #[command(flatten)]
        run: RunFlags,
    },
}

#[derive(Args)]
struct RunFlags {
    /// CSV path or `synthetic`.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    loss: Option<LossKind>,
    #[arg(long)]
    attack_samples: Option<usize>,
    /// Normal rows per attack row.
    #[arg(long)]
    ratio: Option<f64>,
    /// Qubit count (hfqnn) or width of the replacing dense layer (fnn).
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Correlation threshold for feature pruning.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for cached prepared splits.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl From<RunFlags> for PartialConfig {
    fn from(f: RunFlags) -> Self {
        PartialConfig {
            dataset: f.dataset,
            model: f.model,
            loss: f.loss,
            attack_samples: f.attack_samples,
            ratio: f.ratio,
            qubits: f.qubits,
            layers: f.layers,
            epochs: f.epochs,
            learning_rate: f.lr,
            batch_size: f.batch_size,
            seed: f.seed,
            threshold: f.threshold,
            out: f.out,
            cache_dir: f.cache_dir,
        }
    }
}

fn report_error(e: &Error) -> ExitCode {
    eprint!("error: {e}");
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        if !e.to_string().contains(&s.to_string()) {
            eprint!(": {s}");
        }
        source = s.source();
    }
    eprintln!();
    ExitCode::from(e.exit_code() as u8)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Cmd::Train { run, config } => {
            let config = ExperimentConfig::resolve(config.as_deref(), &run.into())?;
            let report = cmd_train(&config)?;
            print!("{}", report.to_text());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Eval {
            checkpoint,
            dataset,
            seed,
            model,
            out,
            cache_dir,
        } => {
            let report = cmd_eval(&EvalOptions {
                checkpoint,
                dataset,
                seed,
                model,
                out,
                cache_dir,
            })?;
            print!("{}", report.to_text());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Grid { spec, run } => {
            let outcome = cmd_grid(&spec, &run.into())?;
            print!("{}", outcome.to_table());
            let code = outcome.exit_code();
            if code != 0 {
                eprintln!("error: {} grid cell(s) failed", outcome.n_failed());
            }
            Ok(ExitCode::from(code as u8))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}
