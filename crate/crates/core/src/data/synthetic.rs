//! Dataset-free inputs for tests and demos.
//!
//! [`generate_synthetic`] produces ADS-B-like rows: normal flights follow
//! smooth constant-speed tracks, attack flights carry either a cumulative
//! lat/lon drift or a merge that splices the tail of another track onto the
//! aircraft's own. Geometric altitude is an exact affine function of the
//! barometric one, so the two are perfectly collinear.
//!
//! [`generate_separable`] produces a plain linearly separable feature set.

use std::f64::consts::PI;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FeatureMatrix, FlightRecord, ATTACK, NORMAL};
use crate::error::{Error, Result};

const METERS_PER_DEGREE: f64 = 111_320.0;
const GEO_OFFSET_M: f64 = 152.4;
/// Small sets use shorter flights so each class still spans this many
/// independent tracks; a handful of tracks makes unrelated columns correlate.
const MIN_FLIGHTS: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_normal: usize,
    pub n_attack: usize,
    pub seed: u64,
    /// Rows per flight, shortened when a class has fewer than
    /// `24 * flight_len` rows.
    pub flight_len: usize,
    /// Seconds between consecutive rows of a flight.
    pub step_seconds: f64,
    /// Degrees added per step, cumulatively, on drift attacks.
    pub drift_per_step: f64,
    /// Share of attack flights that are merges rather than drifts.
    pub merge_fraction: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n_normal: 0,
            n_attack: 0,
            seed: 0,
            flight_len: 40,
            step_seconds: 10.0,
            drift_per_step: 0.01,
            merge_fraction: 0.5,
        }
    }
}

struct Track {
    icao24: String,
    t0: f64,
    lat: f64,
    lon: f64,
    heading: f64,
    velocity: f64,
    altitude: f64,
}

impl Track {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        Self {
            icao24: format!("{:06x}", rng.random_range(0..0x100_0000u32)),
            t0: 1_650_000_000.0 + rng.random_range(0.0..86_400.0),
            lat: rng.random_range(40.0..50.0),
            lon: rng.random_range(-80.0..-70.0),
            heading: rng.random_range(0.0..360.0),
            velocity: rng.random_range(180.0..260.0),
            altitude: rng.random_range(8_000.0..12_000.0),
        }
    }

    /// Positions of the track, one per step, with small heading and speed jitter.
    fn points(&self, cfg: &SyntheticConfig, rng: &mut ChaCha8Rng) -> Vec<FlightRecord> {
        let (mut lat, mut lon) = (self.lat, self.lon);
        let mut heading = self.heading;
        let mut out = Vec::with_capacity(cfg.flight_len);
        for k in 0..cfg.flight_len {
            let velocity = self.velocity + rng.random_range(-2.0..2.0);
            let baro = self.altitude + rng.random_range(-15.0..15.0);
            out.push(FlightRecord {
                time: self.t0 + k as f64 * cfg.step_seconds,
                icao24: self.icao24.clone(),
                lat,
                lon,
                velocity,
                heading: heading.rem_euclid(360.0),
                baroaltitude: baro,
                geoaltitude: baro + GEO_OFFSET_M,
                label: NORMAL,
            });
            let dist = velocity * cfg.step_seconds;
            let h = heading * PI / 180.0;
            lat += dist * h.cos() / METERS_PER_DEGREE;
            lon += dist * h.sin() / (METERS_PER_DEGREE * (lat * PI / 180.0).cos());
            heading += rng.random_range(-0.5..0.5);
        }
        out
    }
}

fn attack_flight(cfg: &SyntheticConfig, rng: &mut ChaCha8Rng) -> Vec<FlightRecord> {
    let own = Track::random(rng);
    let mut rows = own.points(cfg, rng);
    if rng.random_bool(cfg.merge_fraction.clamp(0.0, 1.0)) {
        let other = Track::random(rng);
        let spliced = other.points(cfg, rng);
        let cut = cfg.flight_len / 2;
        for (row, src) in rows.iter_mut().zip(spliced).skip(cut) {
            row.lat = src.lat;
            row.lon = src.lon;
            row.heading = src.heading;
            row.velocity = src.velocity;
            row.baroaltitude = src.baroaltitude;
            row.geoaltitude = src.geoaltitude;
        }
    } else {
        let bearing: f64 = rng.random_range(0.0..2.0 * PI);
        for (k, row) in rows.iter_mut().enumerate() {
            let d = (k + 1) as f64 * cfg.drift_per_step;
            row.lat += d * bearing.cos();
            row.lon += d * bearing.sin();
        }
    }
    for row in &mut rows {
        row.label = ATTACK;
    }
    rows
}

pub fn generate_synthetic_with(cfg: &SyntheticConfig) -> Vec<FlightRecord> {
    let sized = |n: usize| SyntheticConfig {
        flight_len: cfg.flight_len.min(n / MIN_FLIGHTS).max(1),
        ..cfg.clone()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let normal_cfg = sized(cfg.n_normal);
    let mut normal = Vec::with_capacity(cfg.n_normal);
    while normal.len() < cfg.n_normal {
        let track = Track::random(&mut rng);
        normal.extend(track.points(&normal_cfg, &mut rng));
    }
    normal.truncate(cfg.n_normal);
    let attack_cfg = sized(cfg.n_attack);
    let mut attack = Vec::with_capacity(cfg.n_attack);
    while attack.len() < cfg.n_attack {
        attack.extend(attack_flight(&attack_cfg, &mut rng));
    }
    attack.truncate(cfg.n_attack);
    normal.extend(attack);
    normal
}

/// `n_normal` normal rows followed by `n_attack` attack rows.
pub fn generate_synthetic(n_normal: usize, n_attack: usize, seed: u64) -> Vec<FlightRecord> {
    generate_synthetic_with(&SyntheticConfig {
        n_normal,
        n_attack,
        seed,
        ..SyntheticConfig::default()
    })
}

/// `n_samples` rows of uniform features on `[-1, 1]`. The label is 1 when the
/// sum of the first `n_informative` features is positive; rows within 0.1 of
/// the boundary are redrawn, so the classes are separated by a margin.
pub fn generate_separable(
    n_samples: usize,
    n_informative: usize,
    n_noise: usize,
    seed: u64,
) -> Result<FeatureMatrix> {
    if n_informative == 0 {
        return Err(Error::Config("need at least one informative feature".into()));
    }
    let f = n_informative + n_noise;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Array2::zeros((n_samples, f));
    let mut labels = Vec::with_capacity(n_samples);
    let norm = (n_informative as f64).sqrt();
    for mut row in values.rows_mut() {
        let score = loop {
            for v in row.iter_mut() {
                *v = rng.random_range(-1.0..1.0);
            }
            let s: f64 = row.iter().take(n_informative).sum::<f64>() / norm;
            if s.abs() >= 0.1 {
                break s;
            }
        };
        labels.push(u8::from(score > 0.0));
    }
    let names = (0..f)
        .map(|j| {
            if j < n_informative {
                format!("signal{j}")
            } else {
                format!("noise{}", j - n_informative)
            }
        })
        .collect();
    FeatureMatrix::new(values, names, labels)
}
