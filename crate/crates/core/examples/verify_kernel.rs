//! Numerical checks of the kernel identities and inequalities up to a given
//! order; prints only the tightest check per name.
//!
//! ```text
//! cargo run --release --example verify_kernel -- 30
//! ```

use std::collections::BTreeMap;

use winfree::verify::verify;

fn main() -> winfree::Result<()> {
    let n_max: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(30);
    let report = verify(n_max)?;
    let mut tightest: BTreeMap<&str, (u32, f64)> = BTreeMap::new();
    for c in &report.checks {
        let e = tightest.entry(&c.name).or_insert((c.n, c.slack));
        if c.slack < e.1 {
            *e = (c.n, c.slack);
        }
    }
    for (name, (n, slack)) in &tightest {
        println!("{name:<32} n={n:<3} min slack {slack:.3e}");
    }
    println!("{} checks, all passed: {}", report.checks.len(), report.all_passed);
    Ok(())
}
