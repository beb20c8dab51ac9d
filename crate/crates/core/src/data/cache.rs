//! On-disk cache of prepared splits, so grid cells that share a dataset,
//! sampling plan and seed skip ingestion and sampling.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{SamplingPlan, SplitSet};
use crate::error::{Error, Result};

pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitCacheKey {
    /// SHA-256 of the source file, or a description of the generator input.
    pub dataset: String,
    pub plan: SamplingPlan,
    pub split_seed: u64,
    pub threshold: f64,
}

impl SplitCacheKey {
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("key is plain data");
        hex_digest(&json)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedSplit {
    pub version: u32,
    pub key: SplitCacheKey,
    /// Rows read from the source and rows rejected while reading.
    pub rows_loaded: usize,
    pub rows_skipped: usize,
    pub kept: Vec<String>,
    pub dropped: Vec<String>,
    pub split: SplitSet,
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// SHA-256 of a file's contents.
pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex_digest(&bytes))
}

pub fn cache_path(dir: &Path, key: &SplitCacheKey) -> PathBuf {
    dir.join(format!("split-{}.json", key.digest()))
}

/// Loads a cached split if present. A stale version or mismatched key is
/// treated as a miss.
pub fn load(dir: &Path, key: &SplitCacheKey) -> Result<Option<CachedSplit>> {
    let path = cache_path(dir, key);
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let cached: CachedSplit = serde_json::from_str(&text)?;
    if cached.version != CACHE_VERSION || &cached.key != key {
        return Ok(None);
    }
    Ok(Some(cached))
}

pub fn store(dir: &Path, cached: &CachedSplit) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = cache_path(dir, &cached.key);
    let text = serde_json::to_string(cached)?;
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
