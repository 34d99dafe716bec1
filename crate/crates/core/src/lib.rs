//! Variational auto-encoder for univariate time series built from dilated
//! causal convolutions, with α·σ anomaly scoring, hold-out experiments and
//! latent-space projections.
//!
//! Everything is 64-bit and deterministic for a given seed. With the
//! `parallel` feature (default) batch gradients, scoring, encoding and
//! search trials run on rayon; results are reduced in input order, so both
//! builds produce bit-identical numbers.

pub mod data;
pub mod detector;
pub mod error;
pub mod export;
pub mod latent;
pub mod model;
pub mod par;
pub mod tensor;
pub mod trainer;

pub use error::{FaeError, Result};
pub use model::{FaeHyperparams, FaeModel};
