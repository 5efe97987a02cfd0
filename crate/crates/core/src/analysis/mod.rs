//! Rotation numbers, state classification, closed-form thresholds and
//! trajectory checks against them.

mod classify;
mod invariance;
mod locking;
mod moments;
mod rotation;
pub mod thresholds;

pub use classify::{classify, ClassificationResult, Label, Tolerances};
pub(crate) use classify::label_for;
pub use invariance::{check_death_invariance, check_incoherence_gap, check_partial_death};
pub use locking::{
    locking_envelope, CycleRecord, LockingConstants, LockingEnvelopeReport, LockingFunctionals, RESOLUTION_FLOOR,
};
pub(crate) use locking::least_squares_slope;
pub use moments::{cosine_moments, CosineMoments};
pub use rotation::{rotation_numbers, RotationEstimate, DEFAULT_DISCARD};
pub use thresholds::{thresholds, ThresholdReport};
