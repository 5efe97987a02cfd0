//! A small (n, κ) sweep and the critical curves extracted from it.
//!
//! ```text
//! cargo run --release --example phase_diagram -- out/
//! ```
//! Writes `cells.csv` and `curves.csv` into the given directory (default `.`).

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use winfree::dynamics::SimOptions;
use winfree::sweep::{critical_curves, run_sweep, write_cells_csv, write_curves_csv, FrequencySpec, InitialSpec, SweepSpec};

fn main() -> winfree::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&out)?;
    let spec = SweepSpec {
        n_values: vec![1, 2, 5, 10],
        kappa_min: 0.0,
        kappa_max: 8.0,
        kappa_step: 0.25,
        frequencies: FrequencySpec::UniformList { start: 5.4, step: 0.4, count: 10 },
        initial: InitialSpec::UniformBox { alpha: std::f64::consts::FRAC_PI_2 },
        sim: SimOptions::new(1e-2, 200.0).stride(10),
        seeds: vec![0],
        discard_fraction: 0.5,
        tolerances: Default::default(),
    };
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cells = run_sweep(&spec, workers)?;
    let curve = critical_curves(&cells);
    write_cells_csv(&cells, false, BufWriter::new(File::create(out.join("cells.csv"))?))?;
    write_curves_csv(&curve, BufWriter::new(File::create(out.join("curves.csv"))?))?;

    println!("{:>4} {:>8} {:>8} {:>8}", "n", "kappa_i", "kappa_p", "kappa_d");
    let show = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
    for r in &curve.rows {
        println!("{:>4} {:>8} {:>8} {:>8}", r.n, show(r.kappa_i), show(r.kappa_p), show(r.kappa_d));
    }
    if let Some(fit) = &curve.kappa_i_fit {
        println!("kappa_i ~ n^{:.3} (r^2 = {:.3})", fit.slope, fit.r_squared);
    }
    Ok(())
}
