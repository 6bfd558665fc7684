//! Synthesis of mixed continuous/categorical tables with adversarially
//! trained generators.
//!
//! The crate is organized bottom-up:
//!
//! - [`matrix`], [`rng`]: row-major `f64` matrices and seeded randomness.
//! - [`nn`]: dense networks with explicit layers, manual backprop and Adam.
//! - [`data`]: schemas, CSV I/O, per-column transforms between table rows
//!   and the unit-interval feature space the networks operate in, plus
//!   configurable stand-in dataset generation for experiments.
//! - [`gan`]: generator/discriminator presets, the adversarial training
//!   loop, sampling and checkpointing.
//! - [`dist`]: synchronous multi-worker training with gradient averaging.
//! - [`eval`]: two-sample statistics, comparison scores and
//!   train-on-synthetic/test-on-real classifier efficacy.
//! - [`plot`]: deterministic SVG histograms for reports.

pub mod data;
pub mod dist;
pub mod error;
pub mod eval;
pub mod gan;
pub mod matrix;
pub mod nn;
pub mod plot;
pub mod rng;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use rng::SeededRng;
