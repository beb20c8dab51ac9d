//! Single runs, evaluation of saved models and experiment grids.

mod config;
mod grid;
mod pipeline;
mod report;

pub use config::{ExperimentConfig, PartialConfig, SYNTHETIC};
pub use grid::{cell_seed, cmd_grid, run_grid, CellRecord, Coord, GridAxes, GridOutcome, GridRow, GridSpec, MeanStd};
pub use pipeline::{cmd_eval, cmd_train, model_spec, stage_seeds, EvalOptions, CHECKPOINT_FILE, REPORT_FILE};
pub use report::{
    build_id, Command, DatasetSummary, FeatureSummary, RunReport, StageSeeds, Timings, REPORT_FORMAT,
    REPORT_VERSION,
};

use sha2::{Digest, Sha256};

/// Independent seed for a named purpose, derived from a base seed.
pub fn derive_seed(base: u64, parts: &[&str]) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
