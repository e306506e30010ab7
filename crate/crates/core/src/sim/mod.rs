//! Monte-Carlo simulation of toric and planar codes under bit-flip noise.

mod blossom;
mod cover;
mod decoder;
mod geometry;
mod oracles;
mod pattern;
mod shots;
mod syndrome;

pub use blossom::{max_weight_matching, min_weight_perfect_matching};
pub use cover::{cover_distances, CoverDistances, UNREACHABLE};
pub use decoder::{
    class_resolved_weights, decode_shot, mwpm, ClassWeights, DecodeOutcome, DecodingContext, Matching, ShotDecode,
    DEFAULT_NODE_BUDGET,
};
pub use geometry::{build_geometry, CodeGeometry, GeometryKind, Orientation, Qubit};
pub use oracles::{
    enumerate_cycle_pfail_post, enumerate_cycles, exact_failure_polynomial, exhaustive_class_minima,
    CycleEnumeration, FailurePolynomial,
};
pub use pattern::{sample_error, ErrorPattern};
pub use shots::{gap_failure_fraction, run_failure_rate, run_gap_samples, wilson_interval, GapSample, ShotSummary};
pub use syndrome::{error_class, syndrome};
