//! Ten identical oscillators started spread out. The diameter `D(t)` shrinks in
//! steps, faster for sharper kernels.
//!
//! ```text
//! cargo run --release --example coupled_stairs
//! ```

use winfree::dynamics::{simulate, EnsembleState, ModelConfig, SimOptions};

fn main() -> winfree::Result<()> {
    let count = 10;
    let phases: Vec<f64> = (0..count).map(|i| -0.8 + 1.6 * i as f64 / (count - 1) as f64).collect();
    let opts = SimOptions::new(1e-3, 20.0).stride(1000);
    let mut columns = Vec::new();
    for n in [1, 10, 30] {
        let cfg = ModelConfig::identical(n, 1.0, 5.0, count)?;
        let tr = simulate(&cfg, &EnsembleState::at_zero(phases.clone())?, &opts)?;
        columns.push((n, tr));
    }
    print!("{:>6}", "t");
    for (n, _) in &columns {
        print!(" {:>12}", format!("D (n={n})"));
    }
    println!();
    let times = columns[0].1.times().to_vec();
    for (k, t) in times.iter().enumerate() {
        print!("{t:>6.1}");
        for (_, tr) in &columns {
            print!(" {:>12.3e}", tr.diameter()[k]);
        }
        println!();
    }
    Ok(())
}
