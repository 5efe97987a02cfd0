//! Identical oscillators below the locking threshold: the half-spread `R`
//! contracts by a bounded factor every time the cluster passes through zero.
//!
//! ```text
//! cargo run --release --example locking_decay
//! ```

use winfree::analysis::locking_envelope;
use winfree::analysis::thresholds::{alpha_lock, kappa_lock};
use winfree::dynamics::{simulate, EnsembleState, Integrator, ModelConfig, SimOptions};
use winfree::KernelOrder;

fn main() -> winfree::Result<()> {
    let n = 3;
    let k = KernelOrder::new(n)?;
    let nu = 5.0;
    let kappa = 0.9 * kappa_lock(&k, nu);
    let alpha = 0.9 * alpha_lock(&k)?;
    let r0 = 0.5 * alpha;
    let phases: Vec<f64> = (0..5).map(|i| -r0 + 0.5 * r0 * i as f64).collect();
    let cfg = ModelConfig::identical(n, kappa, nu, phases.len())?;
    let opts = SimOptions::new(1e-3, 25.0).integrator(Integrator::Rk4);
    let tr = simulate(&cfg, &EnsembleState::at_zero(phases)?, &opts)?;
    let rep = locking_envelope(&tr, &cfg, alpha)?;

    println!("n={n} kappa={kappa:.4} alpha={alpha:.4} margin={:.4}", rep.margin);
    println!("{:?}", rep.constants);
    println!("{:>5} {:>10} {:>10} {:>10} {:>6}", "level", "ln contract", "ln expand", "ln net", "ok");
    for c in &rep.cycles {
        let ok = c.contract_within_bounds && c.expand_within_bounds.unwrap_or(true) && c.net_negative.unwrap_or(true);
        let net = c.log_net.map_or("-".to_string(), |v| format!("{v:.4}"));
        let expand = c.log_expand.map_or("-".to_string(), |v| format!("{v:.4}"));
        println!("{:>5} {:>10.4} {:>10} {:>10} {:>6}", c.level, c.log_contract, expand, net, ok);
    }
    println!("fitted decay rate per unit time: {:?}", rep.fitted_rate);
    Ok(())
}
