//! Evaluates the five bounded kernels on one random submatrix.
//!
//! The eigenvalue kernels count `σ² ≤ a` and so rise with `a`; the
//! projection kernels count exceedances `> a` and fall.

use cs_ustat::ensembles::{sample_matrix, EnsembleSpec, Law};
use cs_ustat::kernels::{BoundedKernel, Kernel, KernelId};
use cs_ustat::SeedSpec;

fn main() -> cs_ustat::Result<()> {
    let (m, k) = (20, 3);
    let grid = [0.25, 0.5, 1.0, 1.5, 2.0];
    print!("{:<10}", "kernel");
    for a in grid {
        print!(" {:>7}", format!("a={a}"));
    }
    println!();
    for id in [KernelId::EigMin, KernelId::EigMax, KernelId::WorstProj, KernelId::SmallProj, KernelId::InvProj] {
        let kernel = Kernel::new(id, k)?;
        let a = sample_matrix(&EnsembleSpec::new(Law::Gaussian, m, kernel.width()), SeedSpec::new(4))?;
        print!("{:<10}", id.name());
        for v in kernel.eval_grid(&a, &grid)? {
            print!(" {v:>7.3}");
        }
        println!();
    }
    Ok(())
}
