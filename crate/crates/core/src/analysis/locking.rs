//! Envelope estimates for the phase half-spread `R` of an identical ensemble
//! drifting with positive frequency.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::dynamics::{crossing_times, Crossing, CrossingKind, ModelConfig, Trace};
use crate::error::{Result, WinfreeError};
use crate::kernel::KernelOrder;
use crate::quadrature::integrate;

const TOL: f64 = 1e-12;

/// Crossings where `R` has dropped below this are dominated by round-off and
/// are not analysed.
pub const RESOLUTION_FLOOR: f64 = 1e-9;

/// The comparison functions `L₁`, `L₂` bounding `(1/sin R) dR/dA`.
#[derive(Debug, Clone, Copy)]
pub struct LockingFunctionals {
    kernel: KernelOrder,
    nu: f64,
    kappa: f64,
    alpha: f64,
    lipschitz: f64,
}

impl LockingFunctionals {
    /// Requires `ν > 0`, `0 < κ < ν/(2ⁿ aₙ)` and `α ∈ (0, π/2]`.
    pub fn new(kernel: KernelOrder, nu: f64, kappa: f64, alpha: f64) -> Result<Self> {
        if nu.is_nan() || nu <= 0.0 {
            return Err(WinfreeError::Precondition(format!("nu = {nu} must be positive")));
        }
        let bound = nu / kernel.peak();
        if !(kappa > 0.0 && kappa < bound) {
            return Err(WinfreeError::Precondition(format!(
                "kappa = {kappa} must lie in (0, {bound})"
            )));
        }
        if !(alpha > 0.0 && alpha <= FRAC_PI_2) {
            return Err(WinfreeError::Precondition(format!("alpha = {alpha} must lie in (0, pi/2]")));
        }
        Ok(Self { kernel, nu, kappa, alpha, lipschitz: kernel.norms().sup_di })
    }

    pub fn l1(&self, a: f64) -> f64 {
        let denom = self.nu - self.kappa * self.kernel.peak();
        -self.kappa * a.cos() / denom * (self.alpha * self.lipschitz + self.kernel.influence(a))
    }

    pub fn l2(&self, a: f64) -> f64 {
        let denom = self.nu + self.kappa * self.kernel.peak();
        self.kappa * a.cos() / denom * (self.alpha * self.lipschitz - self.kernel.influence(a))
    }

    pub fn constants(&self) -> LockingConstants {
        let contract = (-FRAC_PI_2, FRAC_PI_2);
        let expand = (FRAC_PI_2, 1.5 * PI);
        let int = |f: &dyn Fn(f64) -> f64, (a, b): (f64, f64)| integrate(f, a, b, TOL, TOL).value;
        LockingConstants {
            c1_plus: -int(&|a| self.l1(a), contract),
            c1_minus: int(&|a| self.l1(a), expand),
            c2_plus: -int(&|a| self.l2(a), contract),
            c2_minus: int(&|a| self.l2(a), expand),
        }
    }

    /// `∫_{−π/2}^{π/2} L₂ + ∫_{π/2}^{3π/2} L₁`; negative when one full
    /// cycle is guaranteed to shrink `R`.
    pub fn margin(&self) -> f64 {
        let c = self.constants();
        c.c1_minus - c.c2_plus
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LockingConstants {
    pub c1_plus: f64,
    pub c1_minus: f64,
    pub c2_plus: f64,
    pub c2_minus: f64,
}

impl LockingConstants {
    pub fn all_positive(&self) -> bool {
        [self.c1_plus, self.c1_minus, self.c2_plus, self.c2_minus].iter().all(|&c| c > 0.0)
    }
}

/// One contracting half-cycle `[t_l^-, t_l^+]` and, if recorded, the
/// following expanding half-cycle `[t_l^+, t_{l+1}^-]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleRecord {
    pub level: i64,
    pub t_minus: f64,
    pub t_plus: f64,
    pub t_next_minus: Option<f64>,
    pub r_minus: f64,
    pub r_plus: f64,
    pub r_next_minus: Option<f64>,
    /// `ln(R(t_l^+)/R(t_l^-))`
    pub log_contract: f64,
    /// `ln(R(t_{l+1}^-)/R(t_l^+))`
    pub log_expand: Option<f64>,
    /// `ln(R(t_{l+1}^-)/R(t_l^-))`
    pub log_net: Option<f64>,
    pub contract_within_bounds: bool,
    pub expand_within_bounds: Option<bool>,
    pub net_negative: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LockingEnvelopeReport {
    pub n: u32,
    pub nu: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub constants: LockingConstants,
    pub all_constants_positive: bool,
    /// `∫_{−π/2}^{π/2} L₂ + ∫_{π/2}^{3π/2} L₁`
    pub margin: f64,
    /// `(sin α/α)(C₁⁻ − C₂⁺)`, the per-cycle bound on the net log change.
    pub net_bound: f64,
    pub cycles: Vec<CycleRecord>,
    /// Least-squares slope of `ln R(t_l^-)` against `t_l^-`.
    pub fitted_rate: Option<f64>,
    /// Mean net log change per complete cycle divided by the mean period.
    pub cycle_rate: Option<f64>,
    /// `R ≡ 0`: the ensemble is on the synchronized manifold.
    pub degenerate: bool,
    /// First crossing time skipped because `R` fell below the resolution floor.
    pub truncated_at: Option<f64>,
    pub all_bounds_hold: bool,
}

/// Checks the half-cycle envelope bounds on a recorded trace and estimates
/// the exponential decay rate of `R`.
pub fn locking_envelope(trace: &Trace, config: &ModelConfig, alpha: f64) -> Result<LockingEnvelopeReport> {
    let nu = config.frequencies();
    if nu.iter().any(|&v| v != nu[0]) {
        return Err(WinfreeError::Precondition("natural frequencies are not identical".into()));
    }
    if trace.oscillators() != config.len() {
        return Err(WinfreeError::Shape { expected: config.len(), actual: trace.oscillators() });
    }
    if trace.len() < 2 {
        return Err(WinfreeError::Precondition("trace has fewer than two samples".into()));
    }
    let funcs = LockingFunctionals::new(*config.kernel(), nu[0], config.kappa(), alpha)?;
    let times = trace.times();
    let r = trace.half_spread();
    if let Some(k) = r.iter().position(|&x| x > alpha) {
        return Err(WinfreeError::HypothesesViolated {
            time: times[k],
            reason: format!("R = {} exceeds alpha = {alpha}", r[k]),
        });
    }
    let a = trace.mid();
    if let Some(k) = (1..a.len()).find(|&k| a[k] <= a[k - 1]) {
        return Err(WinfreeError::HypothesesViolated {
            time: times[k],
            reason: "A(t) is not strictly increasing".into(),
        });
    }

    let constants = funcs.constants();
    let ratio = alpha.sin() / alpha;
    let mut report = LockingEnvelopeReport {
        n: config.order(),
        nu: nu[0],
        kappa: config.kappa(),
        alpha,
        constants,
        all_constants_positive: constants.all_positive(),
        margin: constants.c1_minus - constants.c2_plus,
        net_bound: ratio * (constants.c1_minus - constants.c2_plus),
        cycles: Vec::new(),
        fitted_rate: None,
        cycle_rate: None,
        degenerate: r.iter().all(|&x| x == 0.0),
        truncated_at: None,
        all_bounds_hold: true,
    };
    if report.degenerate {
        return Ok(report);
    }

    let crossings = crossing_times(trace)?;
    let r_at = |c: &Crossing| trace.interpolate(r, c.time).expect("crossing lies inside the trace");
    let start = crossings.iter().position(|c| c.kind == CrossingKind::Minus);
    if let Some(start) = start {
        let mut idx = start;
        while idx + 1 < crossings.len() {
            let (cm, cp) = (&crossings[idx], &crossings[idx + 1]);
            let (r_minus, r_plus) = (r_at(cm), r_at(cp));
            if r_minus < RESOLUTION_FLOOR || r_plus < RESOLUTION_FLOOR {
                report.truncated_at = Some(cm.time);
                break;
            }
            let log_contract = (r_plus / r_minus).ln();
            let next = crossings.get(idx + 2).filter(|c| r_at(c) >= RESOLUTION_FLOOR);
            if next.is_none() && idx + 2 < crossings.len() {
                report.truncated_at = Some(crossings[idx + 2].time);
            }
            let r_next = next.map(r_at);
            let log_expand = r_next.map(|rn| (rn / r_plus).ln());
            let log_net = r_next.map(|rn| (rn / r_minus).ln());
            let rec = CycleRecord {
                level: cm.level,
                t_minus: cm.time,
                t_plus: cp.time,
                t_next_minus: next.map(|c| c.time),
                r_minus,
                r_plus,
                r_next_minus: r_next,
                log_contract,
                log_expand,
                log_net,
                contract_within_bounds: -constants.c1_plus < log_contract
                    && log_contract < -ratio * constants.c2_plus,
                expand_within_bounds: log_expand
                    .map(|x| ratio * constants.c2_minus < x && x < constants.c1_minus),
                net_negative: log_net.map(|x| x < 0.0),
            };
            report.all_bounds_hold &= rec.contract_within_bounds
                && rec.expand_within_bounds.unwrap_or(true)
                && rec.net_negative.unwrap_or(true);
            report.cycles.push(rec);
            if next.is_none() {
                break;
            }
            idx += 2;
        }
    }
    let mut minus_points: Vec<(f64, f64)> = report.cycles.iter().map(|c| (c.t_minus, c.r_minus.ln())).collect();
    if let Some(last) = report.cycles.last() {
        if let (Some(t), Some(rn)) = (last.t_next_minus, last.r_next_minus) {
            minus_points.push((t, rn.ln()));
        }
    }
    report.fitted_rate = least_squares_slope(&minus_points);
    let complete: Vec<&CycleRecord> = report.cycles.iter().filter(|c| c.log_net.is_some()).collect();
    if !complete.is_empty() {
        let m = complete.len() as f64;
        let net = complete.iter().map(|c| c.log_net.unwrap()).sum::<f64>() / m;
        let period = complete.iter().map(|c| c.t_next_minus.unwrap() - c.t_minus).sum::<f64>() / m;
        report.cycle_rate = Some(net / period);
    }
    Ok(report)
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
