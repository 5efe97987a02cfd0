use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WinfreeError};

use super::RotationEstimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Death,
    Locking,
    PartialLocking,
    Incoherence,
    Undetermined,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Death => "death",
            Label::Locking => "locking",
            Label::PartialLocking => "partial_locking",
            Label::Incoherence => "incoherence",
            Label::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = WinfreeError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "death" => Label::Death,
            "locking" => Label::Locking,
            "partial_locking" => Label::PartialLocking,
            "incoherence" => Label::Incoherence,
            "undetermined" => Label::Undetermined,
            other => return Err(WinfreeError::Parse(format!("unknown label `{other}`"))),
        })
    }
}

/// Rotation-number tolerances in rad/time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eps_zero: f64,
    pub eps_equal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { eps_zero: 1e-3, eps_equal: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub label: Label,
    pub rho: RotationEstimate,
    pub tolerances: Tolerances,
}

/// Labels the asymptotic state from rotation numbers alone.
///
/// * death: every `|ρ_i| < eps_zero`
/// * locking: every `|ρ_i − ρ̄| < eps_equal` and `|ρ̄| ≥ eps_zero`
/// * incoherence: every pair with `ν_i ≠ ν_j` has `|ρ_i − ρ_j| ≥ eps_equal`
/// * partial locking: some pair with distinct ν shares ρ, but not all do
pub fn classify(est: &RotationEstimate, frequencies: &[f64], tol: Tolerances) -> ClassificationResult {
    ClassificationResult { label: label_for(&est.rho, frequencies, tol), rho: est.clone(), tolerances: tol }
}

pub(crate) fn label_for(rho: &[f64], frequencies: &[f64], tol: Tolerances) -> Label {
    assert_eq!(rho.len(), frequencies.len(), "rotation numbers and frequencies differ in length");
    if rho.iter().all(|r| r.abs() < tol.eps_zero) {
        return Label::Death;
    }
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    if rho.iter().all(|r| (r - mean).abs() < tol.eps_equal) && mean.abs() >= tol.eps_zero {
        return Label::Locking;
    }
    let mut distinct_pairs = 0usize;
    let mut shared_distinct = 0usize;
    for i in 0..rho.len() {
        for j in i + 1..rho.len() {
            if frequencies[i] != frequencies[j] {
                distinct_pairs += 1;
                if (rho[i] - rho[j]).abs() < tol.eps_equal {
                    shared_distinct += 1;
                }
            }
        }
    }
    if distinct_pairs > 0 && shared_distinct == 0 {
        Label::Incoherence
    } else if shared_distinct > 0 {
        // not locked, so some pair necessarily differs
        Label::PartialLocking
    } else {
        Label::Undetermined
    }
}
