//! Closed-form bounds used by the recovery guarantees.

use cs_ustat::bounds::{
    a3_lasso, lasso_magnitude_threshold, noise_condition_prob, noise_floor, proj_tail_bound, rate_constant,
    smax_tail_bound, smin_tail_bound, tau_k, wielandt_bound, TailConstants,
};
use cs_ustat::ensembles::Law;
use cs_ustat::reference::WORST_CASE_EIGENVALUES;

fn main() -> cs_ustat::Result<()> {
    let tc = TailConstants::for_law(Law::Gaussian);
    println!("Gaussian tails (c1 = {})", tc.c1);
    for m in [50, 150, 500, 2000] {
        let smin = smin_tail_bound(m, 0.1, &tc)?;
        let smax = smax_tail_bound(m, 2.0, &tc)?;
        let proj = proj_tail_bound(m, 4, 1.0, 0.04, &tc)?;
        println!(
            "  m={m:<5} Pr{{σmin ≤ 0.1}} ≤ {:.3e}{}  Pr{{σmax > 2}} ≤ {:.3e}  projection tail ≤ {:.3e}{}",
            smin.value,
            if smin.vacuous { " (vacuous)" } else { "" },
            smax.value,
            proj.value,
            if proj.vacuous { " (vacuous)" } else { "" },
        );
    }

    println!("rate constant at a1=0.1, a2=0.5: {:.2}", rate_constant(0.1, 0.5, &tc)?);
    for k in [2, 4, 8] {
        println!(
            "  k={k}: τ_k(2, 0.5) = {:.2}, invertibility-projection bound {:.3}, LASSO a3 at a1=0.29: {:.3}",
            tau_k(2.0, 0.5, k)?,
            wielandt_bound(k, 0.5, 2.0)?,
            a3_lasso(0.29, k)?
        );
    }

    let n = 1000;
    println!("noise conditions hold with probability ≥ {:.6} at n={n}", noise_condition_prob(n)?);
    for sigma in [1e-5, 1e-4, 1e-3, 1e-2] {
        let t = lasso_magnitude_threshold(0.29, 1.0, 1.0, n, sigma)?;
        println!("  σ={sigma:.0e}: magnitude threshold {t:.5}, floor at k=4 {:.5}", noise_floor(4, t)?);
    }

    println!("worst-case Gaussian eigenvalue bounds");
    for c in WORST_CASE_EIGENVALUES {
        println!("  k/m={} m/n={}: σ²min ≥ {}, σ²max ≤ {}", c.k_over_m, c.m_over_n, c.sigma2_min, c.sigma2_max);
    }
    Ok(())
}
