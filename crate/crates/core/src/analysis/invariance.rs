//! Trajectory-level checks of the incoherence gap and of death-region invariance.

use crate::dynamics::{mean_influence, ModelConfig, Trace};
use crate::error::{Result, WinfreeError};

/// `min_t |θ̇_i(t) − θ̇_j(t)|` with the vector field re-evaluated at every
/// recorded state.
pub fn check_incoherence_gap(trace: &Trace, config: &ModelConfig, pair: (usize, usize)) -> Result<f64> {
    let (i, j) = pair;
    let n = config.len();
    if trace.oscillators() != n {
        return Err(WinfreeError::Shape { expected: n, actual: trace.oscillators() });
    }
    if i >= n || j >= n {
        return Err(WinfreeError::Domain(format!("pair ({i}, {j}) out of range for N = {n}")));
    }
    let nu = config.frequencies();
    let mut gap = f64::INFINITY;
    for k in 0..trace.len() {
        let row = trace.phases_at(k);
        let c = config.kappa() * mean_influence(config.kernel(), row);
        let di = nu[i] - c * row[i].sin();
        let dj = nu[j] - c * row[j].sin();
        gap = gap.min((di - dj).abs());
    }
    Ok(gap)
}

fn max_abs(row: &[f64]) -> f64 {
    row.iter().fold(0.0, |m, p| m.max(p.abs()))
}

/// Whether the trace stays inside `B(α) = {max_i |θ_i| < α}`, and the first
/// recorded time it lies inside `B(α*)`.
pub fn check_death_invariance(trace: &Trace, alpha: f64, alpha_star: f64) -> Result<(bool, Option<f64>)> {
    if trace.is_empty() {
        return Err(WinfreeError::Precondition("empty trace".into()));
    }
    if max_abs(trace.phases_at(0)) >= alpha {
        return Err(WinfreeError::Precondition(format!(
            "initial state lies outside B({alpha})"
        )));
    }
    let mut invariant = true;
    let mut entry = None;
    for k in 0..trace.len() {
        let m = max_abs(trace.phases_at(k));
        if m >= alpha {
            invariant = false;
        }
        if entry.is_none() && m < alpha_star {
            entry = Some(trace.times()[k]);
        }
    }
    Ok((invariant, entry))
}

/// Invariance of `B_p(α)`: the first `p` oscillators never leave `(−α, α)`,
/// and any later oscillator that enters the interval stays there.
pub fn check_partial_death(trace: &Trace, alpha: f64, p: usize) -> Result<bool> {
    let n = trace.oscillators();
    if p < 2 || p > n {
        return Err(WinfreeError::Domain(format!("p = {p} outside [2, {n}]")));
    }
    if trace.is_empty() {
        return Err(WinfreeError::Precondition("empty trace".into()));
    }
    if max_abs(&trace.phases_at(0)[..p]) >= alpha {
        return Err(WinfreeError::Precondition(format!(
            "the first {p} oscillators do not all start in (-{alpha}, {alpha})"
        )));
    }
    let mut inside: Vec<bool> = trace.phases_at(0).iter().map(|p| p.abs() < alpha).collect();
    for k in 1..trace.len() {
        for (i, &phase) in trace.phases_at(k).iter().enumerate() {
            let now = phase.abs() < alpha;
            if inside[i] && !now {
                return Ok(false);
            }
            inside[i] |= now;
        }
    }
    Ok(true)
}
