//! Self-check of the kernel constants, shape conditions and the integral
//! inequalities used by the locking estimate. Every check reports its slack,
//! so a failure says how far off it was.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::analysis::thresholds::{alpha_lock, kappa_lock};
use crate::analysis::{cosine_moments, LockingFunctionals};
use crate::error::Result;
use crate::kernel::{log_two_pow_n_norm_lgamma, sensitivity, KernelOrder};
use crate::quadrature::simpson;

pub const VERIFY_SCHEMA_VERSION: u32 = 1;

/// Grid resolution for shape checks and for bracketing extrema.
pub const SHAPE_GRID: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub n: u32,
    pub value: f64,
    pub bound: f64,
    /// Positive when the check passes; its size says by how much.
    pub slack: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub n_max: u32,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

impl VerifyReport {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

struct Collector {
    checks: Vec<Check>,
}

impl Collector {
    /// `value ≤ bound`, allowing `tol` of round-off.
    fn le(&mut self, name: &str, n: u32, value: f64, bound: f64, tol: f64) {
        let slack = bound - value;
        self.checks.push(Check { name: name.into(), n, value, bound, slack, passed: slack >= -tol });
    }

    fn ge(&mut self, name: &str, n: u32, value: f64, bound: f64, tol: f64) {
        let slack = value - bound;
        self.checks.push(Check { name: name.into(), n, value, bound, slack, passed: slack >= -tol });
    }

    /// `|value − target| ≤ tol`; the slack is `tol − |value − target|`.
    fn close(&mut self, name: &str, n: u32, value: f64, target: f64, tol: f64) {
        let slack = tol - (value - target).abs();
        self.checks.push(Check { name: name.into(), n, value, bound: target, slack, passed: slack >= 0.0 });
    }

    fn holds(&mut self, name: &str, n: u32, ok: bool) {
        let v = if ok { 1.0 } else { 0.0 };
        self.checks.push(Check { name: name.into(), n, value: v, bound: 1.0, slack: v - 1.0, passed: ok });
    }
}

/// Maximum of `f` on `[a, b]`: grid scan, then golden-section refinement
/// around the best grid point.
pub fn grid_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: usize) -> f64 {
    let h = (b - a) / (points - 1) as f64;
    let (mut best_k, mut best) = (0, f64::NEG_INFINITY);
    for k in 0..points {
        let v = f(a + k as f64 * h);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let centre = a + best_k as f64 * h;
    let (mut lo, mut hi) = ((centre - h).max(a), (centre + h).min(b));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        if hi - lo < 1e-15 * (1.0 + centre.abs()) {
            break;
        }
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) < f(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    best.max(f(0.5 * (lo + hi)))
}

/// `I_n''(θ) = (n 2^n a_n / 2) cos^{2n−2}(θ/2) ((2n−1) sin²(θ/2) − cos²(θ/2))`.
fn influence_second_derivative(k: &KernelOrder, theta: f64) -> f64 {
    let n = k.order() as f64;
    let (s, c) = (0.5 * theta).sin_cos();
    0.5 * n * k.peak() * (c * c).powi(k.order() as i32 - 1) * ((2.0 * n - 1.0) * s * s - c * c)
}

/// `(S I_n)'(θ) = −cos θ · I_n(θ) − sin θ · I_n'(θ)`.
fn coupling_product_derivative(k: &KernelOrder, theta: f64) -> f64 {
    -theta.cos() * k.influence(theta) - theta.sin() * k.influence_derivative(theta)
}

fn kernel_checks(c: &mut Collector, k: &KernelOrder, previous_b: Option<f64>) {
    let n = k.order();
    let nf = n as f64;
    let peak = k.peak();

    // √(nπ)/2ⁿ ≤ aₙ ≤ √n/2ⁿ⁻¹, scaled by 2ⁿ
    c.ge("norm lower bound", n, peak, (nf * PI).sqrt(), 1e-13 * peak);
    c.le("norm upper bound", n, peak, 2.0 * nf.sqrt(), 1e-13 * peak);

    let b = k.stirling_ratio();
    c.ge("stirling ratio >= 1", n, b, 1.0, 1e-14);
    c.le("stirling ratio <= b_1", n, b, 2.0 / PI.sqrt(), 1e-14);
    if let Some(prev) = previous_b {
        c.le("stirling ratio decreasing", n, b, prev, -f64::EPSILON * prev);
    }

    let lg = log_two_pow_n_norm_lgamma(n);
    c.close("log-sum vs log-gamma", n, k.log_norm() + nf * std::f64::consts::LN_2, lg, 1e-12 * lg.abs().max(1.0));

    let norms = k.norms();
    let rel = 1e-9;
    let grid_i = grid_max(|t| k.influence(t), 0.0, PI, SHAPE_GRID);
    c.close("sup I closed form", n, norms.sup_i, grid_i, rel * grid_i);
    let grid_si = grid_max(|t| k.coupling_product(t).abs(), 0.0, PI, SHAPE_GRID);
    c.close("sup SI closed form", n, norms.sup_si, grid_si, rel * grid_si);
    let grid_di = grid_max(|t| k.influence_derivative(t).abs(), 0.0, PI, SHAPE_GRID);
    c.close("sup I' closed form", n, norms.sup_di, grid_di, rel * grid_di);

    let total = simpson(|t| k.influence(t), -PI, PI, 4000);
    c.close("influence integrates to 2pi", n, total, 2.0 * PI, 1e-8);

    let beta = norms.beta_n;
    let h = PI / SHAPE_GRID as f64;
    let mut shape_ok = true;
    let mut parity_err: f64 = 0.0;
    for j in 0..=SHAPE_GRID {
        let t = j as f64 * h;
        let s = sensitivity(t);
        let i = k.influence(t);
        let di = k.influence_derivative(t);
        shape_ok &= s <= 0.0 && i >= 0.0 && di <= 1e-15 * peak;
        if t <= beta {
            shape_ok &= -t.cos() <= 0.0 && t.sin() >= 0.0;
            shape_ok &= influence_second_derivative(k, t) <= 1e-12 * peak;
        }
        let dsi = coupling_product_derivative(k, t);
        if t > 0.0 && t < beta - h {
            shape_ok &= dsi < 0.0;
        } else if t > beta + h && t < PI - h {
            shape_ok &= dsi > 0.0;
        }
        for &x in &[t, -3.0 * t + 0.37] {
            let scale = peak.max(1.0);
            parity_err = parity_err
                .max((k.influence(-x) - k.influence(x)).abs() / scale)
                .max((k.influence(x + 2.0 * PI) - k.influence(x)).abs() / scale)
                .max((sensitivity(-x) + sensitivity(x)).abs())
                .max((sensitivity(x + 2.0 * PI) - sensitivity(x)).abs());
        }
    }
    c.holds("shape conditions on grid", n, shape_ok);
    c.le("parity and periodicity", n, parity_err, 1e-12, 0.0);

    if n >= 2 {
        let m = cosine_moments(n).expect("n >= 2");
        c.le("cosine moment upper bound", n, m.lhs_i, m.bound_i, 0.0);
        c.ge("cosine moment lower bound", n, m.lhs_ii, m.bound_ii, 0.0);
        c.close("cosine moment identity", n, m.identity_residual, 0.0, 1e-10);

        let nu = 5.0;
        let alpha = (0.9 * alpha_lock(k).expect("n >= 2")).min(FRAC_PI_2);
        let funcs = LockingFunctionals::new(*k, nu, 0.9 * kappa_lock(k, nu), alpha).expect("admissible parameters");
        c.le("locking margin negative", n, funcs.margin(), 0.0, 0.0);
    }
}

/// Runs every check for orders `1..=n_max`.
pub fn verify(n_max: u32) -> Result<VerifyReport> {
    let mut c = Collector { checks: Vec::new() };
    let mut previous_b = None;
    for n in 1..=n_max {
        let k = KernelOrder::new(n)?;
        kernel_checks(&mut c, &k, previous_b);
        previous_b = Some(k.stirling_ratio());
    }
    let all_passed = c.checks.iter().all(|x| x.passed);
    Ok(VerifyReport { schema_version: VERIFY_SCHEMA_VERSION, n_max, checks: c.checks, all_passed })
}
