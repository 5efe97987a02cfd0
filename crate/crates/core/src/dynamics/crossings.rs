use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Result, WinfreeError};

use super::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossingKind {
    /// `A = 2lπ − π/2`: start of a contracting half-cycle.
    Minus,
    /// `A = 2lπ + π/2`: start of an expanding half-cycle.
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub level: i64,
    pub kind: CrossingKind,
    pub time: f64,
}

impl Crossing {
    pub fn target(&self) -> f64 {
        let base = 2.0 * self.level as f64 * PI;
        match self.kind {
            CrossingKind::Minus => base - FRAC_PI_2,
            CrossingKind::Plus => base + FRAC_PI_2,
        }
    }
}

/// Times at which the mid-extremal phase `A(t)` passes `2lπ ∓ π/2`, linearly
/// interpolated between recorded samples (accurate to one recording
/// interval). Requires `A` strictly increasing over the trace.
pub fn crossing_times(trace: &Trace) -> Result<Vec<Crossing>> {
    let a = trace.mid();
    let t = trace.times();
    if a.len() < 2 {
        return Err(WinfreeError::NotApplicable("trace has fewer than two samples".into()));
    }
    if let Some(k) = (1..a.len()).find(|&k| a[k] <= a[k - 1]) {
        return Err(WinfreeError::NotApplicable(format!(
            "A(t) not strictly increasing at t = {}",
            t[k]
        )));
    }
    // targets are m·π − π/2; even m is a Minus crossing at level m/2
    let index = |x: f64| ((x + FRAC_PI_2) / PI).floor() as i64;
    let mut out = Vec::new();
    let mut push = |m: i64, time: f64| {
        let (level, kind) = if m.rem_euclid(2) == 0 {
            (m.div_euclid(2), CrossingKind::Minus)
        } else {
            ((m - 1).div_euclid(2), CrossingKind::Plus)
        };
        out.push(Crossing { level, kind, time });
    };
    let m0 = index(a[0]);
    if m0 as f64 * PI - FRAC_PI_2 == a[0] {
        push(m0, t[0]);
    }
    for k in 1..a.len() {
        for m in index(a[k - 1]) + 1..=index(a[k]) {
            let target = m as f64 * PI - FRAC_PI_2;
            let w = (target - a[k - 1]) / (a[k] - a[k - 1]);
            push(m, t[k - 1] + w * (t[k] - t[k - 1]));
        }
    }
    Ok(out)
}

/// Smallest level with a `Minus` crossing at or after the trace start.
pub fn first_minus_level(crossings: &[Crossing]) -> Option<i64> {
    crossings.iter().find(|c| c.kind == CrossingKind::Minus).map(|c| c.level)
}
