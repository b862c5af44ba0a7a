//! Noiseless basis pursuit failure fractions over sparsity and block length.
//!
//! Kept at desk scale (n ≤ 500); pass a trial count to tighten the
//! estimates.
//!
//!     cargo run --release --example recovery_contour -- [trials]

use cs_ustat::conditions::{run_recovery_experiment, Algorithm, ExperimentConfig};
use cs_ustat::ensembles::{EnsembleSpec, Law};
use cs_ustat::SeedSpec;

fn main() -> cs_ustat::Result<()> {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let m = 50;
    let ns = [200, 300, 400, 500];
    println!("Gaussian m={m}, {trials} trials per cell, failure fraction");
    print!("{:>3}", "k");
    for n in ns {
        print!(" {:>8}", format!("n={n}"));
    }
    println!();
    for k in 1..=8 {
        print!("{k:>3}");
        for n in ns {
            let seed = SeedSpec::new(3).child(n as u64).child(k as u64);
            let config = ExperimentConfig::new(EnsembleSpec::new(Law::Gaussian, m, n), k, trials, Algorithm::Bp, seed);
            let r = run_recovery_experiment(&config)?;
            print!(" {:>8.3}", r.failure_fraction);
        }
        println!();
    }
    Ok(())
}
