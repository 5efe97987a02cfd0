use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Result, WinfreeError};
use crate::kernel::KernelOrder;
use crate::quadrature::integrate;

const TOL: f64 = 1e-12;

/// Half-period moments of `cos A · cos^{2n}(A/2)` and their bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CosineMoments {
    pub n: u32,
    /// `∫_{π/2}^{3π/2} (−cos A) cos^{2n}(A/2) dA`
    pub lhs_i: f64,
    /// `2^{−(n−1)}`
    pub bound_i: f64,
    /// `∫_{−π/2}^{π/2} cos A cos^{2n}(A/2) dA`
    pub lhs_ii: f64,
    /// `(n/(n+1)) (π+2) / (2^n a_n)`
    pub bound_ii: f64,
    /// `lhs_i − (lhs_ii − (π/(2^n a_n)) · 2n/(n+1))`
    pub identity_residual: f64,
}

impl CosineMoments {
    pub fn upper_bound_holds(&self) -> bool {
        self.lhs_i <= self.bound_i
    }

    pub fn lower_bound_holds(&self) -> bool {
        self.lhs_ii >= self.bound_ii
    }
}

pub fn cosine_moments(n: u32) -> Result<CosineMoments> {
    if n < 2 {
        return Err(WinfreeError::UnsupportedOrder { n, reason: "cosine-moment bounds need n >= 2" });
    }
    let k = KernelOrder::new(n)?;
    let nf = n as f64;
    let pow = |a: f64| (0.5 * a).cos().powi(2 * n as i32);
    let lhs_i = integrate(|a| -a.cos() * pow(a), FRAC_PI_2, 1.5 * PI, TOL, TOL).value;
    let lhs_ii = integrate(|a| a.cos() * pow(a), -FRAC_PI_2, FRAC_PI_2, TOL, TOL).value;
    let two_n_an = k.peak();
    Ok(CosineMoments {
        n,
        lhs_i,
        bound_i: 0.5f64.powi(n as i32 - 1),
        lhs_ii,
        bound_ii: nf / (nf + 1.0) * (PI + 2.0) / two_n_an,
        identity_residual: lhs_i - (lhs_ii - PI / two_n_an * 2.0 * nf / (nf + 1.0)),
    })
}
