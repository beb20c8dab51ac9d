use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FeatureMatrix, ATTACK, NORMAL};
use crate::error::{Error, Result};

/// Split weights in tenths: train, validation, test.
const WEIGHTS: [usize; 3] = [7, 2, 1];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSet {
    pub train: FeatureMatrix,
    pub val: FeatureMatrix,
    pub test: FeatureMatrix,
    /// Source row indices of each split, in split row order.
    pub rows: [Vec<usize>; 3],
}

/// Every way to round `n · w / 10` to floor or ceil per split while still
/// summing to `n`.
fn roundings(n: usize) -> Vec<[usize; 3]> {
    let floors = WEIGHTS.map(|w| n * w / 10);
    let fractional: Vec<usize> = (0..3).filter(|&k| !(n * WEIGHTS[k]).is_multiple_of(10)).collect();
    let extra = n - floors.iter().sum::<usize>();
    let mut out = Vec::new();
    for mask in 0u8..8 {
        let chosen: Vec<usize> = (0..3).filter(|k| mask & (1 << k) != 0).collect();
        if chosen.len() == extra && chosen.iter().all(|k| fractional.contains(k)) {
            let mut counts = floors;
            for &k in &chosen {
                counts[k] += 1;
            }
            out.push(counts);
        }
    }
    out
}

/// Train/val/test counts for the normal and attack classes.
type Allocation = [[usize; 3]; 2];

/// Per-class split counts whose column totals are also within one row of
/// the exact 70/20/10 sizes.
fn allocate(n_normal: usize, n_attack: usize) -> Allocation {
    let n = n_normal + n_attack;
    // Deviation of a total from n·w/10, in tenths of a row.
    let deviation = |count: usize, k: usize| (10 * count).abs_diff(n * WEIGHTS[k]);
    let mut best: Option<(Allocation, (usize, usize))> = None;
    for a in roundings(n_normal) {
        for b in roundings(n_attack) {
            let devs: Vec<usize> = (0..3).map(|k| deviation(a[k] + b[k], k)).collect();
            let score = (*devs.iter().max().unwrap(), devs.iter().sum());
            if best.as_ref().is_none_or(|(_, s)| score < *s) {
                best = Some(([a, b], score));
            }
        }
    }
    best.expect("every class size has at least one rounding").0
}

/// Stratified 70/20/10 partition into train, validation and test.
pub fn split_70_20_10(features: &FeatureMatrix, seed: u64) -> Result<SplitSet> {
    let n = features.n_rows();
    if n < 10 {
        return Err(Error::Data(format!("splitting needs at least 10 rows, got {n}")));
    }
    let mut by_class = [features.rows_with_label(NORMAL), features.rows_with_label(ATTACK)];
    for (label, rows) in by_class.iter().enumerate() {
        if rows.len() < 3 {
            return Err(Error::Data(format!(
                "class {label} has {} row(s); a stratified split needs at least 3",
                rows.len()
            )));
        }
    }
    let counts = allocate(by_class[0].len(), by_class[1].len());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: [Vec<usize>; 3] = Default::default();
    for (class_rows, class_counts) in by_class.iter_mut().zip(counts) {
        class_rows.shuffle(&mut rng);
        let mut start = 0;
        for (split, &c) in rows.iter_mut().zip(&class_counts) {
            split.extend_from_slice(&class_rows[start..start + c]);
            start += c;
        }
    }
    for split in rows.iter_mut() {
        split.shuffle(&mut rng);
    }
    Ok(SplitSet {
        train: features.select_rows(&rows[0]),
        val: features.select_rows(&rows[1]),
        test: features.select_rows(&rows[2]),
        rows,
    })
}
