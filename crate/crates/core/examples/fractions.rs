//! Fractions of supports failing each guarantee condition on one matrix,
//! bounded through U-statistics and, where feasible, counted directly.

use cs_ustat::conditions::{estimate_fractions, ConditionConstants, FractionMode};
use cs_ustat::ensembles::{sample_matrix, EnsembleSpec, Law};
use cs_ustat::SeedSpec;

fn main() -> cs_ustat::Result<()> {
    let (m, n, k) = (30, 40, 2);
    let phi = sample_matrix(&EnsembleSpec::new(Law::Gaussian, m, n), SeedSpec::new(5))?;
    let consts = ConditionConstants { a1: 0.29, a2: 1.2, a3: 1.0 };
    let exact = estimate_fractions(&phi, k, &consts, FractionMode::Exhaustive)?;
    let mc = estimate_fractions(&phi, k, &consts, FractionMode::MonteCarlo { trials: 20_000, seed: SeedSpec::new(6) })?;

    println!("Gaussian m={m} n={n} k={k}, a1={} a2={} a3={}", consts.a1, consts.a2, consts.a3);
    println!("{:<12} {:>10} {:>10} {:>10} {:>10}", "fraction", "exhaustive", "direct", "mc", "mc ci");
    for (name, e, r) in [
        ("u1", exact.u1, mc.u1),
        ("u2", exact.u2, mc.u2),
        ("u3", exact.u3, mc.u3),
        ("u3 invproj", exact.u3_invproj, mc.u3_invproj),
    ] {
        let direct = e.direct.map_or("-".to_string(), |d| format!("{d:.5}"));
        println!("{name:<12} {:>10.5} {direct:>10} {:>10.5} {:>10.5}", e.value, r.value, r.ci_halfwidth);
    }
    Ok(())
}
