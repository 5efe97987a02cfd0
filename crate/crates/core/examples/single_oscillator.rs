//! One self-coupled oscillator: how much the coupling slows its rotation.
//!
//! ```text
//! cargo run --example single_oscillator
//! ```

use winfree::cli::single_oscillator;

fn main() -> winfree::Result<()> {
    println!("{:>4} {:>12} {:>12} {:>12}", "n", "rho (euler)", "rho (rk4)", "|rho - nu|");
    for n in [1, 2, 5, 10, 20, 30] {
        let r = single_oscillator(5.0, n, 1.0, 100.0, 1e-2, 0.0)?;
        println!("{:>4} {:>12.6} {:>12.6} {:>12.6}", n, r.rho_euler, r.rho_rk4, r.drift_rk4.abs());
    }
    Ok(())
}
