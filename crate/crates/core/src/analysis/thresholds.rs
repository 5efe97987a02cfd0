//! Closed-form coupling thresholds for incoherence, death and locking.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::ModelConfig;
use crate::error::{Result, WinfreeError};
use crate::kernel::KernelOrder;

pub const THRESHOLD_SCHEMA_VERSION: u32 = 1;

/// `κ^{ij}_inc = |ν_i − ν_j| / (2^{n+1} a_n)`.
pub fn kappa_inc_pair(kernel: &KernelOrder, nu_i: f64, nu_j: f64) -> f64 {
    (nu_i - nu_j).abs() / (2.0 * kernel.peak())
}

/// Smallest pairwise frequency gap, `None` for a single oscillator.
pub fn min_frequency_gap(frequencies: &[f64]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..frequencies.len() {
        for j in i + 1..frequencies.len() {
            let g = (frequencies[i] - frequencies[j]).abs();
            best = Some(best.map_or(g, |b| b.min(g)));
        }
    }
    best
}

/// `ω^∞_{ij} = |ν_i − ν_j| − κ 2^{n+1} a_n`.
pub fn omega_pair(kernel: &KernelOrder, kappa: f64, nu_i: f64, nu_j: f64) -> f64 {
    (nu_i - nu_j).abs() - kappa * 2.0 * kernel.peak()
}

/// `κ_{d,n}(α) = ‖𝒱‖_∞ / |S I_n(α)|`.
pub fn kappa_death(kernel: &KernelOrder, max_abs_frequency: f64, alpha: f64) -> Result<f64> {
    Ok(max_abs_frequency / death_denominator(kernel, alpha)?)
}

/// `(N/p) ‖𝒱‖_∞ / |S I_n(α)|`.
pub fn kappa_death_partial(kernel: &KernelOrder, max_abs_frequency: f64, alpha: f64, n_osc: usize, p: usize) -> Result<f64> {
    if p < 2 || p > n_osc {
        return Err(WinfreeError::Domain(format!("p = {p} outside [2, {n_osc}]")));
    }
    Ok(n_osc as f64 / p as f64 * kappa_death(kernel, max_abs_frequency, alpha)?)
}

fn death_denominator(kernel: &KernelOrder, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < PI) {
        return Err(WinfreeError::Domain(format!("alpha = {alpha} must lie in (0, pi)")));
    }
    let d = kernel.coupling_product(alpha).abs();
    if d == 0.0 {
        return Err(WinfreeError::Domain(format!("S*I_n vanishes at alpha = {alpha}")));
    }
    Ok(d)
}

/// `ν / (2^{n+1} a_n)`: locking coupling bound for an identical ensemble.
pub fn kappa_lock(kernel: &KernelOrder, nu: f64) -> f64 {
    nu / (2.0 * kernel.peak())
}

/// Largest admissible phase-spread bound α for the locking estimate:
///
/// ```text
/// (π/(2^{n+1}a_n) · n/(n+1) − 2^{−n}) · (2n−1)^{−1/2} · (2n/(2n−1))^{n−1}
/// ```
///
/// Only meaningful for n ≥ 2.
pub fn alpha_lock(kernel: &KernelOrder) -> Result<f64> {
    let n = kernel.order();
    if n < 2 {
        return Err(WinfreeError::UnsupportedOrder { n, reason: "locking bound requires n >= 2" });
    }
    let nf = n as f64;
    let lead = PI / (2.0 * kernel.peak()) * nf / (nf + 1.0) - 0.5f64.powi(n as i32);
    Ok(lead / (2.0 * nf - 1.0).sqrt() * ((2.0 * nf) / (2.0 * nf - 1.0)).powi(n as i32 - 1))
}

/// `α · exp[−α √(2n−1) ((2n−1)/(2n))^{n−1} − 2^{−(n−1)}]`, the bound on the
/// initial half-spread `R(0)`.
pub fn r0_bound(kernel: &KernelOrder, alpha: f64) -> f64 {
    let n = kernel.order() as f64;
    let decay = alpha * (2.0 * n - 1.0).sqrt() * ((2.0 * n - 1.0) / (2.0 * n)).powf(n - 1.0);
    alpha * (-decay - 0.5f64.powf(n - 1.0)).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub schema_version: u32,
    pub n: u32,
    pub oscillators: usize,
    pub kappa: f64,
    pub alpha: f64,
    pub p: Option<usize>,
    pub max_abs_frequency: f64,
    /// `None` with fewer than two oscillators.
    pub kappa_inc: Option<f64>,
    pub kappa_inc_pairs: Vec<Vec<f64>>,
    /// `ω_m^∞` at the configured κ.
    pub omega_m: Option<f64>,
    pub kappa_death: f64,
    pub kappa_death_partial: Option<f64>,
    /// `κ_{d,n}(β_n)`, the smallest death threshold over α.
    pub kappa_death_min: f64,
    /// Whether α lies in (β_n, π), where finite-time attraction applies.
    pub alpha_admissible_for_attraction: bool,
    pub beta_n: f64,
    pub alpha_star: Option<f64>,
    /// Only for identical positive frequencies.
    pub kappa_lock: Option<f64>,
    /// Only for n ≥ 2.
    pub alpha_lock: Option<f64>,
    pub r0_bound: f64,
}

/// Evaluates every closed-form threshold for `config` at the given α (and
/// partial-death cluster size `p`, if any).
pub fn thresholds(config: &ModelConfig, alpha: f64, p: Option<usize>) -> Result<ThresholdReport> {
    let k = config.kernel();
    let nu = config.frequencies();
    let vmax = config.max_abs_frequency();
    let kappa_death_v = kappa_death(k, vmax, alpha)?;
    let kappa_death_partial_v = p
        .map(|p| kappa_death_partial(k, vmax, alpha, config.len(), p))
        .transpose()?;
    let beta = k.beta();
    let admissible = alpha > beta && alpha < PI;
    let gap = min_frequency_gap(nu);
    let pairs = nu
        .iter()
        .map(|&a| nu.iter().map(|&b| kappa_inc_pair(k, a, b)).collect())
        .collect();
    let identical_positive = nu.iter().all(|&v| v == nu[0]) && nu[0] > 0.0;
    Ok(ThresholdReport {
        schema_version: THRESHOLD_SCHEMA_VERSION,
        n: k.order(),
        oscillators: config.len(),
        kappa: config.kappa(),
        alpha,
        p,
        max_abs_frequency: vmax,
        kappa_inc: gap.map(|g| g / (2.0 * k.peak())),
        kappa_inc_pairs: pairs,
        omega_m: gap.map(|g| g - config.kappa() * 2.0 * k.peak()),
        kappa_death: kappa_death_v,
        kappa_death_partial: kappa_death_partial_v,
        kappa_death_min: vmax / k.norms().sup_si,
        alpha_admissible_for_attraction: admissible,
        beta_n: beta,
        alpha_star: if admissible { Some(k.alpha_star(alpha)?) } else { None },
        kappa_lock: identical_positive.then(|| kappa_lock(k, nu[0])),
        alpha_lock: alpha_lock(k).ok(),
        r0_bound: r0_bound(k, alpha),
    })
}
