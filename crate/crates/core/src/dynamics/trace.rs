use std::io::{BufRead, Write};

use crate::error::{Result, WinfreeError};
use crate::kernel::KernelOrder;

use super::mean_influence;

/// Recorded time series of lifted phases plus the extremal functionals
/// `A = (max+min)/2`, `R = (max-min)/2`, `D = max-min` and `I_{n,c}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    oscillators: usize,
    times: Vec<f64>,
    phases: Vec<f64>,
    mid: Vec<f64>,
    half_spread: Vec<f64>,
    diameter: Vec<f64>,
    mean_influence: Vec<f64>,
}

impl Trace {
    pub fn with_capacity(oscillators: usize, samples: usize) -> Self {
        Self {
            oscillators,
            times: Vec::with_capacity(samples),
            phases: Vec::with_capacity(samples * oscillators),
            mid: Vec::with_capacity(samples),
            half_spread: Vec::with_capacity(samples),
            diameter: Vec::with_capacity(samples),
            mean_influence: Vec::with_capacity(samples),
        }
    }

    pub fn push(&mut self, t: f64, phases: &[f64], kernel: &KernelOrder) {
        self.push_with_influence(t, phases, mean_influence(kernel, phases));
    }

    fn push_with_influence(&mut self, t: f64, phases: &[f64], inc: f64) {
        debug_assert_eq!(phases.len(), self.oscillators);
        let (lo, hi) = phases
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| (lo.min(p), hi.max(p)));
        self.times.push(t);
        self.phases.extend_from_slice(phases);
        self.mid.push(0.5 * (hi + lo));
        self.half_spread.push(0.5 * (hi - lo));
        self.diameter.push(hi - lo);
        self.mean_influence.push(inc);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn oscillators(&self) -> usize {
        self.oscillators
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn phase(&self, sample: usize, oscillator: usize) -> f64 {
        self.phases[sample * self.oscillators + oscillator]
    }

    pub fn phases_at(&self, sample: usize) -> &[f64] {
        &self.phases[sample * self.oscillators..(sample + 1) * self.oscillators]
    }

    /// Time series of one oscillator.
    pub fn series(&self, oscillator: usize) -> impl Iterator<Item = f64> + '_ {
        self.phases.iter().skip(oscillator).step_by(self.oscillators).copied()
    }

    /// `A(t)`.
    pub fn mid(&self) -> &[f64] {
        &self.mid
    }

    /// `R(t)`.
    pub fn half_spread(&self) -> &[f64] {
        &self.half_spread
    }

    /// `D(Θ(t))`.
    pub fn diameter(&self) -> &[f64] {
        &self.diameter
    }

    /// `I_{n,c}(Θ(t))`.
    pub fn mean_influence(&self) -> &[f64] {
        &self.mean_influence
    }

    /// Linear interpolation of a per-sample series at time `t`.
    pub fn interpolate(&self, series: &[f64], t: f64) -> Option<f64> {
        let k = self.times.partition_point(|&s| s < t);
        if k == 0 {
            return (self.times.first() == Some(&t)).then(|| series[0]);
        }
        if k == self.times.len() {
            return None;
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        Some(series[k - 1] + w * (series[k] - series[k - 1]))
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `t,theta_0,…,theta_{N-1},A,R,D,Inc` with 17 significant digits.
pub fn write_trace_csv<W: Write>(trace: &Trace, mut out: W) -> Result<()> {
    let mut header = String::from("t");
    for i in 0..trace.oscillators {
        header.push_str(&format!(",theta_{i}"));
    }
    header.push_str(",A,R,D,Inc\n");
    out.write_all(header.as_bytes())?;
    let mut line = String::new();
    for k in 0..trace.len() {
        line.clear();
        line.push_str(&fmt(trace.times[k]));
        for &p in trace.phases_at(k) {
            line.push(',');
            line.push_str(&fmt(p));
        }
        for v in [trace.mid[k], trace.half_spread[k], trace.diameter[k], trace.mean_influence[k]] {
            line.push(',');
            line.push_str(&fmt(v));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a trace written by [`write_trace_csv`]. The functional columns are
/// taken from the file, not recomputed.
pub fn read_trace_csv<R: BufRead>(input: R) -> Result<Trace> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| WinfreeError::Parse("empty trace file".into()))??;
    let cols: Vec<&str> = header.trim().split(',').collect();
    let n = cols.len().checked_sub(5).filter(|&n| n > 0).ok_or_else(|| {
        WinfreeError::Parse(format!("trace header has {} columns, need at least 6", cols.len()))
    })?;
    let expected: Vec<String> = std::iter::once("t".to_string())
        .chain((0..n).map(|i| format!("theta_{i}")))
        .chain(["A", "R", "D", "Inc"].iter().map(|s| s.to_string()))
        .collect();
    if cols != expected {
        return Err(WinfreeError::Parse(format!("unexpected trace header `{header}`")));
    }
    let mut trace = Trace::with_capacity(n, 0);
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| WinfreeError::Parse(format!("line {}: {e}", lineno + 2)))?;
        if vals.len() != n + 5 {
            return Err(WinfreeError::Parse(format!(
                "line {}: expected {} fields, got {}",
                lineno + 2,
                n + 5,
                vals.len()
            )));
        }
        trace.times.push(vals[0]);
        trace.phases.extend_from_slice(&vals[1..=n]);
        trace.mid.push(vals[n + 1]);
        trace.half_spread.push(vals[n + 2]);
        trace.diameter.push(vals[n + 3]);
        trace.mean_influence.push(vals[n + 4]);
    }
    Ok(trace)
}
