//! Every closed-form threshold for one configuration, as JSON.
//!
//! ```text
//! cargo run --example thresholds -- 10
//! ```

use std::f64::consts::FRAC_PI_2;

use winfree::analysis::thresholds;
use winfree::dynamics::ModelConfig;

fn main() -> winfree::Result<()> {
    let n: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let nu: Vec<f64> = (0..10).map(|i| 5.4 + 0.4 * i as f64).collect();
    let cfg = ModelConfig::new(n, 1.0, nu)?;
    let report = thresholds(&cfg, FRAC_PI_2, Some(4))?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));

    let identical = ModelConfig::identical(n, 1.0, 5.0, 10)?;
    let r = thresholds(&identical, FRAC_PI_2, None)?;
    println!("identical nu=5: kappa_lock = {:?}, alpha_lock = {:?}", r.kappa_lock, r.alpha_lock);
    Ok(())
}
