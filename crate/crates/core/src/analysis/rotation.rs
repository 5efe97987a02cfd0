use serde::Serialize;

use crate::dynamics::Trace;
use crate::error::{Result, WinfreeError};

/// Per-oscillator asymptotic frequencies estimated over a trailing window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationEstimate {
    pub rho: Vec<f64>,
    pub window: (f64, f64),
    /// Worst deviation of any θ_i(t) from its secant line over the window.
    pub max_residual: f64,
}

impl RotationEstimate {
    pub fn mean(&self) -> f64 {
        self.rho.iter().sum::<f64>() / self.rho.len() as f64
    }

    /// `max ρ − min ρ`.
    pub fn spread(&self) -> f64 {
        let lo = self.rho.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }
}

pub const DEFAULT_DISCARD: f64 = 0.5;

/// Secant slopes `(θ_i(t_end) − θ_i(t_start)) / (t_end − t_start)` after
/// dropping the first `discard_fraction` of the trace duration.
pub fn rotation_numbers(trace: &Trace, discard_fraction: f64) -> Result<RotationEstimate> {
    if !(0.0..1.0).contains(&discard_fraction) {
        return Err(WinfreeError::Window(format!(
            "discard fraction {discard_fraction} outside [0, 1)"
        )));
    }
    let times = trace.times();
    let (Some(&t0), Some(&t1)) = (times.first(), times.last()) else {
        return Err(WinfreeError::Window("empty trace".into()));
    };
    let cut = t0 + discard_fraction * (t1 - t0);
    // small slack so a cut landing on a sample time keeps that sample
    let start = times.partition_point(|&t| t < cut - 1e-9 * (t1 - t0).abs());
    let end = times.len() - 1;
    if start >= end {
        return Err(WinfreeError::Window(format!(
            "window [{cut}, {t1}] holds fewer than two samples"
        )));
    }
    let (ts, te) = (times[start], times[end]);
    let span = te - ts;
    let mut rho = Vec::with_capacity(trace.oscillators());
    let mut max_residual: f64 = 0.0;
    for i in 0..trace.oscillators() {
        let (ps, pe) = (trace.phase(start, i), trace.phase(end, i));
        let slope = (pe - ps) / span;
        for (k, &t) in times.iter().enumerate().take(end + 1).skip(start) {
            let secant = ps + slope * (t - ts);
            max_residual = max_residual.max((trace.phase(k, i) - secant).abs());
        }
        rho.push(slope);
    }
    Ok(RotationEstimate { rho, window: (ts, te), max_residual })
}
