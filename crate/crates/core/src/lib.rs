//! Logical failure rates of toric and planar codes under bit-flip noise.
//!
//! * [`exact`]: closed-form failure probability of the post-selected toric code.
//! * [`regimes`]: path-counting, capillary and scaling approximations.
//! * [`sim`]: Monte-Carlo simulation with an exact matching decoder.
//! * [`analysis`]: histograms, envelope fits, scaling collapse and model comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod exact;
pub mod regimes;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision model point.
pub type ModelPoint = exact::ModelPoint<f64>;
/// Single-precision model point.
pub type ModelPointF32 = exact::ModelPoint<f32>;
/// Double-precision sector logs.
pub type SectorLogs = exact::SectorLogs<f64>;
/// Single-precision sector logs.
pub type SectorLogsF32 = exact::SectorLogs<f32>;
