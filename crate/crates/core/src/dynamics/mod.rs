//! Right-hand side, fixed-step integration and recorded functionals.
//!
//! ```text
//! θ̇_i = ν_i + (κ/N) Σ_j I_n(θ_j) S(θ_i) = ν_i − κ I_{n,c}(Θ) sin θ_i
//! ```
//!
//! The factored (Adler) form needs one shared reduction `I_{n,c}` per
//! evaluation, so the RHS is O(N). Phases are lifted: they live on the real
//! line and are never wrapped.

mod crossings;
mod trace;

pub use crossings::{crossing_times, first_minus_level, Crossing, CrossingKind};
pub use trace::{read_trace_csv, write_trace_csv, Trace};

use serde::{Deserialize, Serialize};

use crate::error::{Result, WinfreeError};
use crate::kernel::KernelOrder;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    kernel: KernelOrder,
    kappa: f64,
    frequencies: Vec<f64>,
}

impl ModelConfig {
    pub fn new(n: u32, kappa: f64, frequencies: Vec<f64>) -> Result<Self> {
        let kernel = KernelOrder::new(n)?;
        Self::with_kernel(kernel, kappa, frequencies)
    }

    pub fn with_kernel(kernel: KernelOrder, kappa: f64, frequencies: Vec<f64>) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(WinfreeError::InvalidConfig("at least one oscillator required".into()));
        }
        if let Some(bad) = frequencies.iter().find(|v| !v.is_finite()) {
            return Err(WinfreeError::InvalidConfig(format!("non-finite frequency {bad}")));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(WinfreeError::InvalidConfig(format!("kappa = {kappa} must be finite and >= 0")));
        }
        Ok(Self { kernel, kappa, frequencies })
    }

    /// `N` copies of the same natural frequency.
    pub fn identical(n: u32, kappa: f64, nu: f64, count: usize) -> Result<Self> {
        Self::new(n, kappa, vec![nu; count])
    }

    pub fn kernel(&self) -> &KernelOrder {
        &self.kernel
    }

    pub fn order(&self) -> u32 {
        self.kernel.order()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// `‖𝒱‖_∞`.
    pub fn max_abs_frequency(&self) -> f64 {
        self.frequencies.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::with_kernel(self.kernel, kappa, self.frequencies.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleState {
    pub t: f64,
    pub phases: Vec<f64>,
}

impl EnsembleState {
    pub fn new(t: f64, phases: Vec<f64>) -> Result<Self> {
        if let Some(bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(WinfreeError::InvalidConfig(format!("non-finite initial phase {bad}")));
        }
        Ok(Self { t, phases })
    }

    pub fn at_zero(phases: Vec<f64>) -> Result<Self> {
        Self::new(0.0, phases)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    #[default]
    Euler,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimOptions {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default)]
    pub integrator: Integrator,
}

fn default_stride() -> usize {
    1
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { dt: 1e-2, t_end: 500.0, record_stride: 1, integrator: Integrator::Euler }
    }
}

impl SimOptions {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self { dt, t_end, ..Self::default() }
    }

    pub fn stride(mut self, record_stride: usize) -> Self {
        self.record_stride = record_stride;
        self
    }

    pub fn integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(WinfreeError::InvalidConfig(format!("dt = {} must be > 0", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(WinfreeError::InvalidConfig(format!("t_end = {} must be > 0", self.t_end)));
        }
        if self.dt > self.t_end {
            return Err(WinfreeError::InvalidConfig(format!(
                "dt = {} exceeds t_end = {}",
                self.dt, self.t_end
            )));
        }
        if self.record_stride == 0 {
            return Err(WinfreeError::InvalidConfig("record_stride must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of integration steps needed to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt + 1e-9).floor() as usize
    }

    /// Number of recorded samples, including `t = 0`.
    pub fn samples(&self) -> usize {
        self.steps() / self.record_stride + 1
    }
}

/// Fixed-order pairwise sum, so the reduction is reproducible no matter how
/// the surrounding loop is scheduled.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        values.iter().sum()
    } else {
        let (l, r) = values.split_at(values.len() / 2);
        pairwise_sum(l) + pairwise_sum(r)
    }
}

/// `I_{n,c}(Θ) = (1/N) Σ_k I_n(θ_k)`.
pub fn mean_influence(kernel: &KernelOrder, phases: &[f64]) -> f64 {
    const CHUNK: usize = 64;
    if phases.len() <= CHUNK {
        let mut buf = [0.0; CHUNK];
        for (b, &p) in buf.iter_mut().zip(phases) {
            *b = kernel.influence(p);
        }
        pairwise_sum(&buf[..phases.len()]) / phases.len() as f64
    } else {
        let vals: Vec<f64> = phases.iter().map(|&p| kernel.influence(p)).collect();
        pairwise_sum(&vals) / phases.len() as f64
    }
}

fn rhs_into(config: &ModelConfig, phases: &[f64], out: &mut [f64]) {
    let gain = config.kappa * mean_influence(&config.kernel, phases);
    for ((o, &p), &nu) in out.iter_mut().zip(phases).zip(&config.frequencies) {
        *o = nu - gain * p.sin();
    }
}

fn check_dim(config: &ModelConfig, phases: &[f64]) -> Result<()> {
    if phases.len() != config.len() {
        return Err(WinfreeError::Shape { expected: config.len(), actual: phases.len() });
    }
    Ok(())
}

/// Phase velocities `θ̇_i` at the given state.
pub fn rhs(config: &ModelConfig, state: &EnsembleState) -> Result<Vec<f64>> {
    check_dim(config, &state.phases)?;
    let mut out = vec![0.0; config.len()];
    rhs_into(config, &state.phases, &mut out);
    Ok(out)
}

/// Scratch buffers for repeated stepping without reallocation.
pub(crate) struct Stepper {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Stepper {
    pub(crate) fn new(len: usize) -> Self {
        Self {
            k1: vec![0.0; len],
            k2: vec![0.0; len],
            k3: vec![0.0; len],
            k4: vec![0.0; len],
            tmp: vec![0.0; len],
        }
    }

    pub(crate) fn advance(&mut self, config: &ModelConfig, phases: &mut [f64], dt: f64, integrator: Integrator) {
        match integrator {
            Integrator::Euler => {
                rhs_into(config, phases, &mut self.k1);
                for (p, k) in phases.iter_mut().zip(&self.k1) {
                    *p += dt * k;
                }
            }
            Integrator::Rk4 => {
                let half = 0.5 * dt;
                rhs_into(config, phases, &mut self.k1);
                for ((t, &p), k) in self.tmp.iter_mut().zip(phases.iter()).zip(&self.k1) {
                    *t = p + half * k;
                }
                rhs_into(config, &self.tmp, &mut self.k2);
                for ((t, &p), k) in self.tmp.iter_mut().zip(phases.iter()).zip(&self.k2) {
                    *t = p + half * k;
                }
                rhs_into(config, &self.tmp, &mut self.k3);
                for ((t, &p), k) in self.tmp.iter_mut().zip(phases.iter()).zip(&self.k3) {
                    *t = p + dt * k;
                }
                rhs_into(config, &self.tmp, &mut self.k4);
                let sixth = dt / 6.0;
                for (i, p) in phases.iter_mut().enumerate() {
                    *p += sixth * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
                }
            }
        }
    }
}

/// One integration step of size `dt`.
pub fn step(config: &ModelConfig, state: &EnsembleState, dt: f64, integrator: Integrator) -> Result<EnsembleState> {
    check_dim(config, &state.phases)?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(WinfreeError::InvalidConfig(format!("dt = {dt} must be > 0")));
    }
    let mut phases = state.phases.clone();
    Stepper::new(phases.len()).advance(config, &mut phases, dt, integrator);
    let t = state.t + dt;
    if phases.iter().any(|p| !p.is_finite()) {
        return Err(WinfreeError::Divergence { time: t, partial: None });
    }
    Ok(EnsembleState { t, phases })
}

/// Integrates from `initial` to `initial.t + opts.t_end`, recording every
/// `record_stride`-th state. Deterministic: identical inputs give
/// bit-identical traces.
pub fn simulate(config: &ModelConfig, initial: &EnsembleState, opts: &SimOptions) -> Result<Trace> {
    check_dim(config, &initial.phases)?;
    opts.validate()?;
    let steps = opts.steps();
    let mut trace = Trace::with_capacity(config.len(), opts.samples());
    let mut phases = initial.phases.clone();
    let mut stepper = Stepper::new(phases.len());
    trace.push(initial.t, &phases, config.kernel());
    for i in 1..=steps {
        stepper.advance(config, &mut phases, opts.dt, opts.integrator);
        let t = initial.t + i as f64 * opts.dt;
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(WinfreeError::Divergence { time: t, partial: Some(Box::new(trace)) });
        }
        if i % opts.record_stride == 0 {
            trace.push(t, &phases, config.kernel());
        }
    }
    Ok(trace)
}
