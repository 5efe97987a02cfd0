use thiserror::Error;

use crate::dynamics::Trace;

#[derive(Error, Debug)]
pub enum WinfreeError {
    #[error("invalid coupling order {0}: must be a positive integer")]
    InvalidOrder(i64),

    #[error("coupling order {n} unsupported: {reason}")]
    UnsupportedOrder { n: u32, reason: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected} oscillators, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Non-finite phase produced by the integrator. Carries the samples
    /// recorded before the blow-up.
    #[error("numerical divergence at t = {time}")]
    Divergence { time: f64, partial: Option<Box<Trace>> },

    #[error("window error: {0}")]
    Window(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypotheses violated at t = {time}: {reason}")]
    HypothesesViolated { time: f64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, WinfreeError>;
