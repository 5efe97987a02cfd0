//! Above the death threshold a box `(−α, α)` around zero traps every phase.
//! The run checks that no oscillator leaves and that the ensemble enters the
//! smaller box of half-width `α*`.
//!
//! ```text
//! cargo run --release --example death_box
//! ```

use winfree::analysis::thresholds::kappa_death;
use winfree::analysis::{check_death_invariance, check_partial_death};
use winfree::dynamics::{simulate, EnsembleState, ModelConfig, SimOptions};
use winfree::KernelOrder;

fn main() -> winfree::Result<()> {
    let nu = vec![-1.0, -0.5, 0.2, 0.7, 1.0];
    let alpha = 1.2;
    for n in [1, 3, 8] {
        let k = KernelOrder::new(n)?;
        let kd = kappa_death(&k, 1.0, alpha)?;
        let kappa = 1.05 * kd;
        let cfg = ModelConfig::new(n, kappa, nu.clone())?;
        let start: Vec<f64> = (0..nu.len()).map(|i| alpha * (0.9 - 0.45 * i as f64)).collect();
        let dt = (0.5 / (kappa * k.peak())).min(1e-2);
        let tr = simulate(&cfg, &EnsembleState::at_zero(start)?, &SimOptions::new(dt, 30.0))?;
        let (stayed, entered) = check_death_invariance(&tr, alpha, k.alpha_star(alpha)?)?;
        let partial = check_partial_death(&tr, alpha, 2)?;
        println!(
            "n={n:<2} kappa_d={kd:.4} alpha*={:.4} stayed={stayed} entered_at={entered:?} first-two-trapped={partial}",
            k.alpha_star(alpha)?
        );
    }
    Ok(())
}
