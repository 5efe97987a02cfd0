//! Parallel `(n, κ)` grids: simulate and classify every cell, then read off
//! empirical critical couplings per order.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::time::Instant;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{label_for, least_squares_slope, rotation_numbers, Label, Tolerances, DEFAULT_DISCARD};
use crate::dynamics::{simulate, EnsembleState, ModelConfig, SimOptions};
use crate::error::{Result, WinfreeError};

pub const CURVES_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FrequencySpec {
    Identical { nu: f64, count: usize },
    /// `start, start + step, …` with `count` entries.
    UniformList { start: f64, step: f64, count: usize },
    Explicit(Vec<f64>),
}

impl FrequencySpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            FrequencySpec::Identical { nu, count } => vec![*nu; *count],
            FrequencySpec::UniformList { start, step, count } => {
                (0..*count).map(|k| start + k as f64 * step).collect()
            }
            FrequencySpec::Explicit(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Independent uniform phases in `(−α, α)`, drawn per cell.
    UniformBox { alpha: f64 },
    Explicit(Vec<f64>),
}

fn default_discard() -> f64 {
    DEFAULT_DISCARD
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub n_values: Vec<u32>,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub kappa_step: f64,
    pub frequencies: FrequencySpec,
    pub initial: InitialSpec,
    #[serde(default)]
    pub sim: SimOptions,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_discard")]
    pub discard_fraction: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(WinfreeError::InvalidConfig(m));
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return bad("n_values must be a non-empty list of positive integers".into());
        }
        if !(self.kappa_step > 0.0 && self.kappa_step.is_finite()) {
            return bad(format!("kappa_step = {} must be positive", self.kappa_step));
        }
        if !(self.kappa_min >= 0.0 && self.kappa_max >= self.kappa_min && self.kappa_max.is_finite()) {
            return bad(format!("kappa range [{}, {}] is invalid", self.kappa_min, self.kappa_max));
        }
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        if !(0.0..1.0).contains(&self.discard_fraction) {
            return bad(format!("discard_fraction = {} outside [0, 1)", self.discard_fraction));
        }
        let nu = self.frequencies.values();
        if nu.is_empty() || nu.iter().any(|v| !v.is_finite()) {
            return bad("frequencies must be a non-empty list of finite values".into());
        }
        match &self.initial {
            InitialSpec::UniformBox { alpha } if !(*alpha > 0.0 && alpha.is_finite()) => {
                return bad(format!("uniform_box alpha = {alpha} must be positive"));
            }
            InitialSpec::Explicit(p) if p.len() != nu.len() => {
                return bad(format!("{} initial phases for {} oscillators", p.len(), nu.len()));
            }
            _ => {}
        }
        self.sim.validate()
    }

    /// κ values on the grid, rounded to 1e-9 so that accumulated steps do
    /// not leak into cell keys.
    pub fn kappa_grid(&self) -> Vec<f64> {
        let count = ((self.kappa_max - self.kappa_min) / self.kappa_step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| ((self.kappa_min + k as f64 * self.kappa_step) * 1e9).round() / 1e9)
            .collect()
    }

    /// Replaces the order and coupling grids with n = 1..=30, κ ∈ [0, 8],
    /// Δκ = 0.05.
    pub fn with_full_grid(mut self) -> Self {
        self.n_values = (1..=30).collect();
        self.kappa_min = 0.0;
        self.kappa_max = 8.0;
        self.kappa_step = 0.05;
        self
    }
}

/// Initial phases for one cell. The RNG stream depends only on the seed and
/// the cell's `(n, κ)` values, never on grid position.
pub fn cell_initial_phases(initial: &InitialSpec, count: usize, seed: u64, n: u32, kappa: f64) -> Vec<f64> {
    match initial {
        InitialSpec::Explicit(p) => p.clone(),
        InitialSpec::UniformBox { alpha } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let kappa_key = (kappa * 1e6).round() as u64;
            rng.set_stream(((n as u64) << 40) ^ kappa_key);
            (0..count)
                .map(|_| {
                    let u: f64 = rng.sample(Open01);
                    alpha * (2.0 * u - 1.0)
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub n: u32,
    pub kappa: f64,
    pub seed: u64,
    pub label: Label,
    pub rho_mean: Option<f64>,
    pub rho_spread: Option<f64>,
    pub wall_time_s: Option<f64>,
    pub note: Option<String>,
}

fn run_cell(spec: &SweepSpec, nu: &[f64], n: u32, kappa: f64, seed: u64) -> SweepCell {
    let started = Instant::now();
    let mut cell = SweepCell {
        n,
        kappa,
        seed,
        label: Label::Undetermined,
        rho_mean: None,
        rho_spread: None,
        wall_time_s: None,
        note: None,
    };
    let outcome = (|| -> Result<()> {
        let cfg = ModelConfig::new(n, kappa, nu.to_vec())?;
        let phases = cell_initial_phases(&spec.initial, nu.len(), seed, n, kappa);
        let trace = simulate(&cfg, &EnsembleState::at_zero(phases)?, &spec.sim)?;
        let est = rotation_numbers(&trace, spec.discard_fraction)?;
        cell.label = label_for(&est.rho, nu, spec.tolerances);
        cell.rho_mean = Some(est.mean());
        cell.rho_spread = Some(est.spread());
        Ok(())
    })();
    if let Err(e) = outcome {
        cell.label = Label::Undetermined;
        cell.note = Some(e.to_string());
    }
    cell.wall_time_s = Some(started.elapsed().as_secs_f64());
    cell
}

/// Simulates every `(n, κ, seed)` cell on a pool of `workers` threads.
/// Output is sorted by `(n, κ, seed)` and independent of `workers`.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<SweepCell>> {
    spec.validate()?;
    let nu = spec.frequencies.values();
    let kappas = spec.kappa_grid();
    let mut n_values = spec.n_values.clone();
    n_values.sort_unstable();
    n_values.dedup();
    let mut seeds = spec.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    let mut coords = Vec::with_capacity(n_values.len() * kappas.len() * seeds.len());
    for &n in &n_values {
        for &k in &kappas {
            coords.extend(seeds.iter().map(|&s| (n, k, s)));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| WinfreeError::InvalidConfig(format!("worker pool: {e}")))?;
    Ok(pool.install(|| coords.par_iter().map(|&(n, k, s)| run_cell(spec, &nu, n, k, s)).collect()))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes `n,kappa,seed,label,rho_mean,rho_spread,wall_time_s`. Timings are
/// left blank unless requested, so the file is reproducible byte for byte.
pub fn write_cells_csv<W: Write>(cells: &[SweepCell], record_timings: bool, mut out: W) -> Result<()> {
    writeln!(out, "n,kappa,seed,label,rho_mean,rho_spread,wall_time_s")?;
    for c in cells {
        let wall = if record_timings { opt(c.wall_time_s) } else { String::new() };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            c.n,
            c.kappa,
            c.seed,
            c.label,
            opt(c.rho_mean),
            opt(c.rho_spread),
            wall
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_cells_csv<R: BufRead>(input: R) -> Result<Vec<SweepCell>> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| WinfreeError::Parse("empty cells file".into()))??;
    if header.trim() != "n,kappa,seed,label,rho_mean,rho_spread,wall_time_s" {
        return Err(WinfreeError::Parse(format!("unexpected cells header `{header}`")));
    }
    let mut cells = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |m: String| WinfreeError::Parse(format!("line {}: {m}", i + 2));
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 7 {
            return Err(err(format!("expected 7 fields, got {}", f.len())));
        }
        let float = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|e| err(format!("{e}")))
            }
        };
        cells.push(SweepCell {
            n: f[0].parse().map_err(|e| err(format!("n: {e}")))?,
            kappa: f[1].parse().map_err(|e| err(format!("kappa: {e}")))?,
            seed: f[2].parse().map_err(|e| err(format!("seed: {e}")))?,
            label: f[3].parse()?,
            rho_mean: float(f[4])?,
            rho_spread: float(f[5])?,
            wall_time_s: float(f[6])?,
            note: None,
        });
    }
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub n: u32,
    pub kappa_i: Option<f64>,
    pub kappa_p: Option<f64>,
    pub kappa_d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerFit {
    /// Slope of `ln κ` against `ln n`.
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalCurve {
    pub schema_version: u32,
    pub rows: Vec<CurveRow>,
    pub kappa_i_fit: Option<PowerFit>,
    pub kappa_d_fit: Option<PowerFit>,
    /// Non-increasing in n over the orders where the value is defined.
    pub kappa_i_monotone: bool,
    pub kappa_d_monotone: bool,
}

impl CriticalCurve {
    pub fn loglog_slope(&self) -> Option<f64> {
        self.kappa_i_fit.as_ref().map(|f| f.slope)
    }
}

fn power_fit(points: &[(u32, f64)]) -> Option<PowerFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, k)| *k > 0.0)
        .map(|&(n, k)| ((n as f64).ln(), k.ln()))
        .collect();
    let slope = least_squares_slope(&logs)?;
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let intercept = my - slope * mx;
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some(PowerFit { slope, intercept, points: logs.len(), r_squared })
}

fn non_increasing(values: &[Option<f64>]) -> bool {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    defined.windows(2).all(|w| w[1] <= w[0])
}

/// Per-order boundaries read off the grid:
///
/// * `κ_d`: smallest κ from which every cell upward is death (bracketed by a
///   non-death cell below)
/// * `κ_i`: largest κ with an incoherent cell (bracketed by a non-incoherent
///   cell above)
/// * `κ_p`: largest κ with a partially locked cell, when locked cells occur
///   too
pub fn critical_curves(cells: &[SweepCell]) -> CriticalCurve {
    let mut by_n: BTreeMap<u32, Vec<&SweepCell>> = BTreeMap::new();
    for c in cells {
        by_n.entry(c.n).or_default().push(c);
    }
    let mut rows = Vec::new();
    for (n, mut col) in by_n {
        col.sort_by(|a, b| a.kappa.total_cmp(&b.kappa).then(a.seed.cmp(&b.seed)));
        let has = |l: Label| col.iter().any(|c| c.label == l);

        let first_tail_death = col.iter().rposition(|c| c.label != Label::Death).map_or(0, |i| i + 1);
        let kappa_d = (first_tail_death > 0 && first_tail_death < col.len()).then(|| col[first_tail_death].kappa);

        let kappa_i = col.iter().rposition(|c| c.label == Label::Incoherence).and_then(|i| {
            let k = col[i].kappa;
            col.iter().any(|c| c.kappa > k && c.label != Label::Incoherence).then_some(k)
        });

        let kappa_p = (has(Label::PartialLocking) && has(Label::Locking))
            .then(|| col.iter().rev().find(|c| c.label == Label::PartialLocking).map(|c| c.kappa))
            .flatten();

        rows.push(CurveRow { n, kappa_i, kappa_p, kappa_d });
    }
    let pts = |f: fn(&CurveRow) -> Option<f64>| -> Vec<(u32, f64)> {
        rows.iter().filter_map(|r| f(r).map(|k| (r.n, k))).collect()
    };
    let ki: Vec<Option<f64>> = rows.iter().map(|r| r.kappa_i).collect();
    let kd: Vec<Option<f64>> = rows.iter().map(|r| r.kappa_d).collect();
    CriticalCurve {
        schema_version: CURVES_SCHEMA_VERSION,
        kappa_i_fit: power_fit(&pts(|r| r.kappa_i)),
        kappa_d_fit: power_fit(&pts(|r| r.kappa_d)),
        kappa_i_monotone: non_increasing(&ki),
        kappa_d_monotone: non_increasing(&kd),
        rows,
    }
}

pub fn write_curves_csv<W: Write>(curve: &CriticalCurve, mut out: W) -> Result<()> {
    writeln!(out, "n,kappa_i,kappa_p,kappa_d")?;
    for r in &curve.rows {
        writeln!(out, "{},{},{},{}", r.n, opt(r.kappa_i), opt(r.kappa_p), opt(r.kappa_d))?;
    }
    out.flush()?;
    Ok(())
}
