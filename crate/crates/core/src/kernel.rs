//! Order-n influence/sensitivity pair.
//!
//! The influence function is the normalized bump
//!
//! ```text
//! I_n(θ) = a_n (1 + cos θ)^n = 2^n a_n cos^{2n}(θ/2),   S(θ) = -sin θ
//! ```
//!
//! with `a_n = (2n)!! / (2^n (2n-1)!!)` chosen so that `I_n` integrates to
//! `2π` over one period. `2^n a_n` grows like `√(nπ)` while `a_n` itself
//! underflows near n ≈ 1075, so everything is carried in log space and the
//! bump is evaluated through the half-angle form, which never overflows and
//! avoids the cancellation in `1 + cos θ` near `θ = π`.

use std::f64::consts::{LN_2, PI};

use crate::error::{Result, WinfreeError};

/// Coupling order together with its precomputed normalizing constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOrder {
    n: u32,
    log_norm: f64,
    peak: f64,
}

/// Closed-form extrema of the kernel pair.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KernelNorms {
    /// `‖I_n‖_∞ = 2^n a_n`, attained at θ = 0.
    pub sup_i: f64,
    /// `‖S I_n‖_∞`, attained at ±β_n.
    pub sup_si: f64,
    /// `‖I_n'‖_∞`, attained at ±θ̃.
    pub sup_di: f64,
    /// Minimizer of `S I_n` on (0, π): `arccos(n/(n+1))`.
    pub beta_n: f64,
    /// Maximizer of `|I_n'|` on (0, π): `arccos((n-1)/n)`.
    pub theta_tilde: f64,
}

/// `ln(2^n a_n) = Σ_{k=1}^{n} ln(1 + 1/(2k-1))`, every term positive.
pub fn log_two_pow_n_norm(n: u32) -> f64 {
    (1..=n).map(|k| (1.0 / (2 * k - 1) as f64).ln_1p()).sum()
}

/// Same quantity through `2^n a_n = 4^n (n!)^2 / (2n)!` and log-gamma.
pub fn log_two_pow_n_norm_lgamma(n: u32) -> f64 {
    let n = n as f64;
    2.0 * n * LN_2 + 2.0 * libm::lgamma(n + 1.0) - libm::lgamma(2.0 * n + 1.0)
}

impl KernelOrder {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(WinfreeError::InvalidOrder(0));
        }
        let log_peak = log_two_pow_n_norm(n);
        Ok(Self {
            n,
            log_norm: log_peak - n as f64 * LN_2,
            peak: log_peak.exp(),
        })
    }

    /// Accepts a signed order as read from user input.
    pub fn from_signed(n: i64) -> Result<Self> {
        match u32::try_from(n) {
            Ok(n) if n > 0 => Self::new(n),
            _ => Err(WinfreeError::InvalidOrder(n)),
        }
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    /// `ln a_n`.
    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// `a_n`; underflows to zero for very large orders, use [`Self::log_norm`] there.
    pub fn norm(&self) -> f64 {
        self.log_norm.exp()
    }

    /// `2^n a_n`, the peak height of the bump.
    pub fn peak(&self) -> f64 {
        self.peak
    }

    /// `b_n = 2^n a_n / √(nπ)`, which decreases to 1.
    pub fn stirling_ratio(&self) -> f64 {
        (self.peak.ln() - 0.5 * (self.n as f64 * PI).ln()).exp()
    }

    /// `I_n(θ)`. Accepts lifted phases; NaN in, NaN out.
    #[inline]
    pub fn influence(&self, theta: f64) -> f64 {
        let c = (0.5 * theta).cos();
        self.peak * (c * c).powi(self.n as i32)
    }

    /// `S(θ) I_n(θ)`.
    #[inline]
    pub fn coupling_product(&self, theta: f64) -> f64 {
        sensitivity(theta) * self.influence(theta)
    }

    /// `I_n'(θ) = -n a_n (1 + cos θ)^{n-1} sin θ`.
    #[inline]
    pub fn influence_derivative(&self, theta: f64) -> f64 {
        let c = (0.5 * theta).cos();
        -(self.n as f64) * 0.5 * self.peak * (c * c).powi(self.n as i32 - 1) * theta.sin()
    }

    pub fn checked_influence(&self, theta: f64) -> Result<f64> {
        finite(theta).map(|t| self.influence(t))
    }

    pub fn checked_coupling_product(&self, theta: f64) -> Result<f64> {
        finite(theta).map(|t| self.coupling_product(t))
    }

    pub fn checked_influence_derivative(&self, theta: f64) -> Result<f64> {
        finite(theta).map(|t| self.influence_derivative(t))
    }

    pub fn norms(&self) -> KernelNorms {
        let n = self.n as f64;
        // (1 + cos β)^n sin β with cos β = n/(n+1), sin β = √(2n+1)/(n+1)
        let log_sup_si = self.log_norm + n * ((2.0 * n + 1.0) / (n + 1.0)).ln()
            + 0.5 * (2.0 * n + 1.0).ln()
            - (n + 1.0).ln();
        let log_sup_di = self.log_norm
            + (n - 1.0) * ((2.0 * n - 1.0) / n).ln()
            + 0.5 * (2.0 * n - 1.0).ln();
        KernelNorms {
            sup_i: self.peak,
            sup_si: log_sup_si.exp(),
            sup_di: log_sup_di.exp(),
            beta_n: (2.0 * n + 1.0).sqrt().atan2(n),
            theta_tilde: (2.0 * n - 1.0).sqrt().atan2(n - 1.0),
        }
    }

    /// `arccos(n/(n+1))`.
    pub fn beta(&self) -> f64 {
        let n = self.n as f64;
        (2.0 * n + 1.0).sqrt().atan2(n)
    }

    /// The level point of `S I_n` left of β_n: the unique `α* ∈ (0, β_n]` with
    /// `S I_n(α*) = S I_n(α)` for `α ∈ (β_n, π)`.
    ///
    /// Bisection, since `S I_n` is strictly decreasing on `(0, β_n)` and its
    /// derivative vanishes at β_n.
    pub fn alpha_star(&self, alpha: f64) -> Result<f64> {
        let beta = self.beta();
        if !alpha.is_finite() || alpha <= beta || alpha >= PI {
            return Err(WinfreeError::Domain(format!(
                "alpha = {alpha} outside (beta_n, pi) = ({beta}, {PI})"
            )));
        }
        let level = self.coupling_product(alpha);
        let (mut lo, mut hi) = (0.0_f64, beta);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if self.coupling_product(mid) > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// `S(θ) = -sin θ`.
#[inline]
pub fn sensitivity(theta: f64) -> f64 {
    -theta.sin()
}

pub fn checked_sensitivity(theta: f64) -> Result<f64> {
    finite(theta).map(sensitivity)
}

fn finite(theta: f64) -> Result<f64> {
    if theta.is_finite() {
        Ok(theta)
    } else {
        Err(WinfreeError::Domain(format!("non-finite phase {theta}")))
    }
}
