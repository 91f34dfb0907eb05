//! Localization of directional RF emitters by direct position determination
//! with joint estimation of the emitter beampattern.
//!
//! - [`geometry`]: angles, delays, beampattern and steering models
//! - [`signal`]: frequency-domain observation synthesis
//! - [`estimators`]: cost functions, grid searches, alternating maximization,
//!   baselines and the method registry
//! - [`crlb`]: Fisher information and the position bound
//! - [`metrics`] and [`montecarlo`]: evaluation metrics and the trial engine

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod crlb;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod metrics;
pub mod montecarlo;
pub mod presets;
pub mod scenario;
pub mod seeds;
pub mod signal;

pub use error::{Error, Result};
