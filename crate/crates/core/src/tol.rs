//! Numerical tolerances shared across the crate.
//!
//! The underlying mathematics is exact; these are the slack values used when
//! the same statements are checked in `f64`.

/// Two expected receiver payoffs closer than this are treated as a tie.
pub const INDIFFERENCE: f64 = 1e-9;

/// Belief coordinates must sum to one within this.
pub const BELIEF_SUM: f64 = 1e-12;

/// Information-structure weights must sum to one within this.
pub const WEIGHT_SUM: f64 = 1e-10;

/// Per-coordinate Bayes plausibility slack.
pub const PLAUSIBILITY: f64 = 1e-9;

/// Weights above this negative value are treated as zero.
pub const NEGATIVE_WEIGHT: f64 = -1e-10;

/// Smallest singular value below which a support is affinely dependent.
pub const AFFINE_RANK: f64 = 1e-9;

/// Half-space slack used for region membership.
pub const MEMBERSHIP: f64 = 1e-9;

/// Vertices closer than this (max-norm) are merged.
pub const VERTEX_DEDUP: f64 = 1e-8;

/// Weights below this are dropped from computed structures.
pub const ZERO_WEIGHT: f64 = 1e-12;

/// Linear feasibility acceptance threshold (total infeasibility).
pub const LP_FEASIBILITY: f64 = 1e-9;

/// Results within this of the best value are considered tied.
pub const VALUE_TIE: f64 = 1e-9;
