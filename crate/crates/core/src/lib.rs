//! Embedded, supervised hyperspectral band selection.
//!
//! Two selector layers train jointly with a small dense classifier:
//! a stochastic-gate layer with an l0-surrogate regularizer and hard top-k
//! finalization, and a concrete selector layer driven by row-wise
//! Gumbel-Softmax with temperature annealing and segmented initialization.
//! Around them: synthetic planted-band datasets, the evaluation metric
//! suite (overall/average accuracy, kappa, IoU family, bands-performance
//! AUC), k-fold cross-validation, and an independent verification harness.
//!
//! Everything is deterministic given a seed, including parallel fold
//! execution.

pub mod concrete;
pub mod data;
pub mod error;
pub mod gate;
pub mod math;
pub mod metrics;
pub mod net;
pub mod optim;
pub mod rng;
pub mod selection;
pub mod train;
pub mod verify;

pub use error::{Error, Result};
pub use selection::BandSelection;
