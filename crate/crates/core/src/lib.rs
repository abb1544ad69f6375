//! Compressive-sensing MIMO radar over a wireless network: scene and signal
//! synthesis, compressed sensing matrices, a complex Dantzig selector, baseline
//! estimators, evaluation metrics and a Monte Carlo harness.

pub mod baselines;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod scene;
pub mod sensing;
pub mod signal;
pub mod solver;
pub mod waveform;

pub use error::{Error, Result};
