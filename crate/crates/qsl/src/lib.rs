//! Quantum similarity learning on an exact statevector simulator.
//!
//! The crate provides the building blocks for learning task-dependent,
//! possibly asymmetric similarity between data from two (possibly different)
//! spaces by embedding inputs into qubit registers with parameterized
//! circuits:
//!
//! - [`state`]: dense statevector simulation, partial traces, overlaps;
//! - [`embedding`]: the layered data-embedding ansatz and the fixed two-qubit
//!   pair circuit used by the analytic study;
//! - [`similarity`]: the three similarity functionals (full overlap,
//!   partial-SWAP, partial projection) and derived distances;
//! - [`optimize`]: derivative-free minimizers (linear trust region and
//!   Nelder-Mead);
//! - [`train`]: pair datasets, squared similarity loss, stochastic batching
//!   and the training driver, plus parameter-shift feature gradients;
//! - [`dataset`]: seeded synthetic data generators;
//! - [`analysis`]: density of states, retrieval losses, Wasserstein distance,
//!   goodness estimation and landmark separators;
//! - [`tasks`]: end-to-end drivers for classification, graph completion,
//!   generative optimization and the measurement studies.
//!
//! Everything is deterministic given the seeds carried in the configuration
//! types; there is no hidden global randomness.

pub mod analysis;
pub mod dataset;
pub mod embedding;
pub mod error;
pub mod optimize;
pub mod seed;
pub mod similarity;
pub mod state;
pub mod tasks;
pub mod train;

pub use error::{Error, Result};
