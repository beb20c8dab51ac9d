//! Hybrid quantum-classical anomaly detection for ADS-B flight records.
//!
//! The crate bundles a small statevector simulator, a strongly entangling
//! variational circuit with parameter-shift gradients, dense layers trained
//! with Adam, the data pipeline and the experiment runner used by the CLI.

pub mod data;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod nn;
pub mod statevector;
pub mod vqc;

pub use error::{Error, Result};
