//! Sparse-coding two-layer linear network: training, baselines, data
//! handling, metrics, and a linear classifier head.

pub mod baselines;
pub mod classifier;
pub mod data;
pub mod error;
pub mod metrics;
pub mod model;
pub mod tensor;

pub use error::{Result, ScnnError};
pub use tensor::{Matrix, SeededRng};
