//! LASSO pattern recovery against the predicted noise floor.
//!
//! Sweeps the noise level on a Bernoulli design with uniform magnitudes and
//! prints the empirical failure fraction next to `1 − (1 − t)^k`.
//!
//!     cargo run --release --example lasso_noise_floor -- [trials]

use cs_ustat::bounds::a3_lasso;
use cs_ustat::conditions::{noise_floor_overlay, run_recovery_experiment, Algorithm, ExperimentConfig, SignalModel};
use cs_ustat::ensembles::{EnsembleSpec, Law};
use cs_ustat::SeedSpec;

fn main() -> cs_ustat::Result<()> {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let (m, n, k) = (150, 1000, 4);
    let mut config = ExperimentConfig::new(EnsembleSpec::new(Law::Bernoulli, m, n), k, trials, Algorithm::Lasso, SeedSpec::new(2024));
    config.signal_model = SignalModel::UniformMagnitude;
    config.lasso_a = 1.0;

    let sigmas = [1e-5, 1e-4, 1e-3];
    let a1 = 0.29;
    let floors = noise_floor_overlay(&config, a1, 1.0, &sigmas)?;
    let floors_lasso = noise_floor_overlay(&config, a1, a3_lasso(a1, k)?, &sigmas)?;

    println!("Bernoulli m={m} n={n} k={k}, {trials} trials per level");
    println!("{:>8} {:>10} {:>10} {:>12} {:>12} {:>8}", "sigma", "fail", "ci", "floor(a3=1)", "floor(a3*)", "solver");
    for ((s, f), g) in sigmas.iter().zip(&floors).zip(&floors_lasso) {
        config.sigma_z = *s;
        let r = run_recovery_experiment(&config)?;
        println!(
            "{:>8.0e} {:>10.5} {:>10.5} {:>12.5} {:>12.5} {:>8}",
            s, r.failure_fraction, r.ci_halfwidth, f.floor, g.floor, r.solver_failures
        );
    }
    Ok(())
}
