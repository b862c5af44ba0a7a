//! U-statistic concentration: `U_n(a)` for a small and a larger block length
//! against the marginal mean `p(a)` and the deviation envelope `ε_n(a)`.
//!
//!     cargo run --release --example concentration -- [eigmin|eigmax]

use cs_ustat::ensembles::{sample_matrix, EnsembleSpec, Law};
use cs_ustat::kernels::{Kernel, KernelId};
use cs_ustat::ustat::{deviation_envelope, marginal_mean_mc_grid, ustat_exhaustive_grid};
use cs_ustat::SeedSpec;

fn main() -> cs_ustat::Result<()> {
    let id: KernelId = std::env::args().nth(1).as_deref().unwrap_or("eigmin").parse()?;
    let (m, k) = (25, 2);
    let kernel = Kernel::new(id, k)?;
    let grid: Vec<f64> = (1..=16).map(|i| 0.25 * i as f64).collect();

    let p = marginal_mean_mc_grid(&EnsembleSpec::new(Law::Gaussian, m, k), &kernel, &grid, 100_000, SeedSpec::new(1))?;
    let phi = sample_matrix(&EnsembleSpec::new(Law::Gaussian, m, 100), SeedSpec::new(7))?;
    let u25 = ustat_exhaustive_grid(&phi.columns(0, 25).into_owned(), &kernel, &grid, 1_000_000)?;
    let u100 = ustat_exhaustive_grid(&phi, &kernel, &grid, 1_000_000)?;

    println!("{id}, Gaussian m={m}, k={k}");
    println!("{:>5} {:>8} {:>8} {:>8} {:>8} {:>8}", "a", "p(a)", "U_25", "ε_25", "U_100", "ε_100");
    for i in 0..grid.len() {
        let pv = p[i].value;
        let e25 = deviation_envelope(pv, 25, k)?.epsilon_n;
        let e100 = deviation_envelope(pv, 100, k)?.epsilon_n;
        println!(
            "{:>5.2} {pv:>8.4} {:>8.4} {e25:>8.4} {:>8.4} {e100:>8.4}",
            grid[i], u25[i].value, u100[i].value
        );
    }
    Ok(())
}
