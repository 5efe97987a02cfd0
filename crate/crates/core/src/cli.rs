//! Command-line front end. [`run`] returns the process exit code:
//! 0 success, 1 verification failure, 2 usage or configuration error,
//! 3 numerical divergence.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{classify, rotation_numbers, thresholds, Label, Tolerances, DEFAULT_DISCARD};
use crate::config::{parse_json, RunConfig};
use crate::dynamics::{read_trace_csv, simulate, write_trace_csv, EnsembleState, Integrator, ModelConfig, SimOptions};
use crate::error::{Result, WinfreeError};
use crate::sweep::{critical_curves, run_sweep, write_cells_csv, write_curves_csv, SweepSpec};
use crate::verify::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "winfree", version, about = "Winfree model with order-n coupling: simulate, classify, thresholds, sweeps")]
pub struct Cli {
    /// Directory for output files (created if missing).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "WINFREE_WORKERS")]
    pub workers: Option<usize>,
    /// Suppress informational output.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one configuration, writing a trace CSV and a summary JSON.
    Simulate { config: PathBuf },
    /// Drift of a single oscillator under self-coupling.
    Single(SingleArgs),
    /// Classify a recorded trace from its rotation numbers.
    Classify(ClassifyArgs),
    /// Closed-form coupling thresholds as JSON.
    Thresholds(ThresholdArgs),
    /// Phase-diagram sweep over (n, kappa).
    Sweep(SweepArgs),
    /// Check kernel constants and integral inequalities up to an order.
    Verify {
        #[arg(long, default_value_t = 30)]
        n_max: u32,
        /// Print the full report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct SingleArgs {
    #[arg(long, default_value_t = 5.0)]
    pub nu: f64,
    #[arg(long, short)]
    pub n: u32,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta0: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    pub trace: PathBuf,
    /// Run configuration the trace came from (for the frequencies).
    #[arg(long, conflicts_with = "frequencies")]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub frequencies: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_DISCARD)]
    pub discard: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub eps_zero: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub eps_equal: f64,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, short)]
    pub n: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub kappa: f64,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required_unless_present = "identical_nu")]
    pub frequencies: Option<Vec<f64>>,
    #[arg(long, requires = "oscillators", conflicts_with = "frequencies")]
    pub identical_nu: Option<f64>,
    #[arg(long)]
    pub oscillators: Option<usize>,
    /// Cluster size for the partial-death threshold.
    #[arg(long)]
    pub p: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub spec: PathBuf,
    /// Use n = 1..=30 and a 0.05 coupling step over [0, 8].
    #[arg(long)]
    pub full_grid: bool,
    /// Fill the wall_time_s column (makes the CSV run-dependent).
    #[arg(long)]
    pub record_timings: bool,
}

fn exit_code(e: &WinfreeError) -> i32 {
    match e {
        WinfreeError::Divergence { .. } => EXIT_DIVERGENCE,
        _ => EXIT_USAGE,
    }
}

struct Ctx {
    out_dir: PathBuf,
    workers: usize,
    quiet: bool,
}

impl Ctx {
    fn info(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.out_dir.join(p)
        }
    }

    fn create(&self, p: &Path) -> Result<BufWriter<File>> {
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir)?;
        }
        Ok(BufWriter::new(File::create(p)?))
    }
}

fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    let ctx = Ctx {
        out_dir: cli.out_dir.clone().unwrap_or_else(|| PathBuf::from(".")),
        workers: cli
            .workers
            .filter(|&w| w > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        quiet: cli.quiet,
    };
    let outcome = match cli.command {
        Command::Simulate { config } => cmd_simulate(&ctx, &config),
        Command::Single(a) => cmd_single(&a),
        Command::Classify(a) => cmd_classify(&a),
        Command::Thresholds(a) => cmd_thresholds(&ctx, &a),
        Command::Sweep(a) => cmd_sweep(&ctx, &a),
        Command::Verify { n_max, json } => cmd_verify(n_max, json),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[derive(Serialize)]
struct SimulationSummary {
    schema_version: u32,
    n: u32,
    oscillators: usize,
    kappa: f64,
    final_time: f64,
    final_diameter: f64,
    final_half_spread: f64,
    label: Label,
    rho: Vec<f64>,
    rho_window: (f64, f64),
    max_residual: f64,
}

fn cmd_simulate(ctx: &Ctx, path: &Path) -> Result<i32> {
    let cfg = RunConfig::load(path)?;
    let model = cfg.model_config()?;
    let initial = cfg.initial_state()?;
    let trace_path = ctx.path(&cfg.outputs.trace_path);
    let report_path = ctx.path(&cfg.outputs.report_path);
    let trace = match simulate(&model, &initial, &cfg.sim) {
        Ok(t) => t,
        Err(WinfreeError::Divergence { time, partial }) => {
            if let Some(p) = &partial {
                write_trace_csv(p, ctx.create(&trace_path)?)?;
                ctx.info(format!("partial trace written to {}", trace_path.display()));
            }
            return Err(WinfreeError::Divergence { time, partial });
        }
        Err(e) => return Err(e),
    };
    let est = rotation_numbers(&trace, cfg.classify.discard_fraction)?;
    let result = classify(&est, model.frequencies(), cfg.classify.tolerances);
    let last = trace.len() - 1;
    let summary = SimulationSummary {
        schema_version: 1,
        n: model.order(),
        oscillators: model.len(),
        kappa: model.kappa(),
        final_time: trace.times()[last],
        final_diameter: trace.diameter()[last],
        final_half_spread: trace.half_spread()[last],
        label: result.label,
        rho: est.rho.clone(),
        rho_window: est.window,
        max_residual: est.max_residual,
    };
    write_trace_csv(&trace, ctx.create(&trace_path)?)?;
    write_json(&summary, ctx.create(&report_path)?)?;
    ctx.info(format!(
        "{}: {} ({} samples) -> {}, {}",
        path.display(),
        result.label,
        trace.len(),
        trace_path.display(),
        report_path.display()
    ));
    Ok(EXIT_OK)
}

#[derive(Serialize)]
pub struct SingleReport {
    pub nu: f64,
    pub n: u32,
    pub kappa: f64,
    pub t_end: f64,
    pub dt: f64,
    pub rho_euler: f64,
    pub rho_rk4: f64,
    pub drift_euler: f64,
    pub drift_rk4: f64,
}

/// Rotation number of one oscillator under both integrators.
pub fn single_oscillator(nu: f64, n: u32, kappa: f64, t_end: f64, dt: f64, theta0: f64) -> Result<SingleReport> {
    let model = ModelConfig::new(n, kappa, vec![nu])?;
    let st = EnsembleState::at_zero(vec![theta0])?;
    let stride = ((t_end / dt) / 10_000.0).max(1.0) as usize;
    let rho = |integrator| -> Result<f64> {
        let opts = SimOptions::new(dt, t_end).stride(stride).integrator(integrator);
        Ok(rotation_numbers(&simulate(&model, &st, &opts)?, DEFAULT_DISCARD)?.rho[0])
    };
    let (re, rk) = (rho(Integrator::Euler)?, rho(Integrator::Rk4)?);
    Ok(SingleReport { nu, n, kappa, t_end, dt, rho_euler: re, rho_rk4: rk, drift_euler: re - nu, drift_rk4: rk - nu })
}

fn cmd_single(a: &SingleArgs) -> Result<i32> {
    let r = single_oscillator(a.nu, a.n, a.kappa, a.t_end, a.dt, a.theta0)?;
    if a.json {
        write_json(&r, std::io::stdout().lock())?;
    } else {
        println!("integrator  rho                   rho - nu");
        println!("euler       {:<20.12}  {:+.12}", r.rho_euler, r.drift_euler);
        println!("rk4         {:<20.12}  {:+.12}", r.rho_rk4, r.drift_rk4);
    }
    Ok(EXIT_OK)
}

fn cmd_classify(a: &ClassifyArgs) -> Result<i32> {
    let freqs = match (&a.config, &a.frequencies) {
        (Some(p), None) => RunConfig::load(p)?.frequencies()?,
        (None, Some(f)) => f.clone(),
        _ => return Err(WinfreeError::InvalidConfig("give --config or --frequencies".into())),
    };
    let file = File::open(&a.trace).map_err(|e| WinfreeError::InvalidConfig(format!("{}: {e}", a.trace.display())))?;
    let trace = read_trace_csv(BufReader::new(file))?;
    if trace.oscillators() != freqs.len() {
        return Err(WinfreeError::Shape { expected: freqs.len(), actual: trace.oscillators() });
    }
    let est = rotation_numbers(&trace, a.discard)?;
    let tol = Tolerances { eps_zero: a.eps_zero, eps_equal: a.eps_equal };
    write_json(&classify(&est, &freqs, tol), std::io::stdout().lock())?;
    Ok(EXIT_OK)
}

fn cmd_thresholds(ctx: &Ctx, a: &ThresholdArgs) -> Result<i32> {
    let freqs = match (&a.frequencies, a.identical_nu, a.oscillators) {
        (Some(f), None, _) => f.clone(),
        (None, Some(nu), Some(count)) => vec![nu; count],
        _ => return Err(WinfreeError::InvalidConfig("give --frequencies or --identical-nu with --oscillators".into())),
    };
    let kernel = crate::kernel::KernelOrder::from_signed(a.n)?;
    let model = ModelConfig::with_kernel(kernel, a.kappa, freqs)?;
    let report = thresholds(&model, a.alpha, a.p)?;
    write_json(&report, std::io::stdout().lock())?;
    if ctx.out_dir != Path::new(".") {
        let p = ctx.path(Path::new("thresholds.json"));
        write_json(&report, ctx.create(&p)?)?;
        ctx.info(format!("wrote {}", p.display()));
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(ctx: &Ctx, a: &SweepArgs) -> Result<i32> {
    let text = fs::read_to_string(&a.spec)
        .map_err(|e| WinfreeError::InvalidConfig(format!("{}: {e}", a.spec.display())))?;
    let mut spec: SweepSpec = parse_json(&text, &a.spec.display().to_string())?;
    if a.full_grid {
        spec = spec.with_full_grid();
    }
    spec.validate()?;
    ctx.info(format!(
        "sweeping {} orders x {} couplings x {} seeds on {} workers",
        spec.n_values.len(),
        spec.kappa_grid().len(),
        spec.seeds.len(),
        ctx.workers
    ));
    let cells = run_sweep(&spec, ctx.workers)?;
    for c in cells.iter().filter(|c| c.note.is_some()) {
        ctx.info(format!("n={} kappa={} seed={}: {}", c.n, c.kappa, c.seed, c.note.as_deref().unwrap_or("")));
    }
    let curves = critical_curves(&cells);
    let cells_path = ctx.path(Path::new("cells.csv"));
    write_cells_csv(&cells, a.record_timings, ctx.create(&cells_path)?)?;
    write_curves_csv(&curves, ctx.create(&ctx.path(Path::new("curves.csv")))?)?;
    write_json(&curves, ctx.create(&ctx.path(Path::new("curves.json")))?)?;
    ctx.info(format!("wrote cells.csv, curves.csv, curves.json to {}", ctx.out_dir.display()));
    Ok(EXIT_OK)
}

fn cmd_verify(n_max: u32, json: bool) -> Result<i32> {
    let report = verify(n_max)?;
    let mut out = std::io::stdout().lock();
    if json {
        write_json(&report, &mut out)?;
    } else {
        writeln!(out, "{:<34} {:>4} {:>14} {:>6}", "check", "n", "slack", "result")?;
        for c in &report.checks {
            let verdict = if c.passed { "pass" } else { "FAIL" };
            writeln!(out, "{:<34} {:>4} {:>14.6e} {:>6}", c.name, c.n, c.slack, verdict)?;
        }
    }
    if let Some(f) = report.first_failure() {
        eprintln!(
            "verification failed: {} at n = {} (value {}, bound {}, slack {:e})",
            f.name, f.n, f.value, f.bound, f.slack
        );
        return Ok(EXIT_VERIFY_FAILED);
    }
    Ok(EXIT_OK)
}
