use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ConditionConstants;
use crate::combinatorics::{binomial, next_combination};
use crate::error::{Error, Result};
use crate::kernels::{all_sign_vectors, Kernel, KernelId, SignMode};
use crate::linalg::{pseudoinverse, select_columns, Tolerances};
use crate::rng::SeedSpec;
use crate::ustat::{scaled_fraction_bound, ustat_exhaustive_grid, ustat_mc_grid, UStatResult, DEFAULT_ENUMERATION_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FractionMode {
    Exhaustive,
    MonteCarlo { trials: u64, seed: SeedSpec },
}

/// One failure fraction: the kernel-based upper bound and, when computed,
/// the exact count it bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionEstimate {
    /// Upper bound on the failing fraction, clamped to `[0, 1]`.
    pub value: f64,
    /// Bound before clamping.
    pub raw: f64,
    /// 95% half width of `raw` (zero when exhaustive).
    pub ci_halfwidth: f64,
    /// Exact failing fraction by direct enumeration.
    pub direct: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionEstimates {
    /// Subsets with `σmin(Φ_S) ≤ a1`.
    pub u1: FractionEstimate,
    /// Sign-subset pairs with some `|(Φ_S†φᵢ)ᵀβ| > a2`, bounded by
    /// `(n−k)·U_n(a2)`.
    pub u2: FractionEstimate,
    /// Subsets with some `‖Φ_S†φᵢ‖∞ > a3`, bounded by `(n−k)·U_n(a3)`.
    pub u3: FractionEstimate,
    /// Sign-subset pairs with `‖(Φ_SᵀΦ_S)⁻¹β‖∞ > a3`.
    pub u3_invproj: FractionEstimate,
}

fn run(phi: &DMatrix<f64>, kernel: &Kernel, a: f64, mode: &FractionMode, stream: u64) -> Result<UStatResult> {
    Ok(match mode {
        FractionMode::Exhaustive => ustat_exhaustive_grid(phi, kernel, &[a], DEFAULT_ENUMERATION_CAP)?,
        FractionMode::MonteCarlo { trials, seed } => ustat_mc_grid(phi, kernel, &[a], *trials, seed.child(stream))?,
    }
    .remove(0))
}

fn unscaled(r: &UStatResult) -> FractionEstimate {
    FractionEstimate {
        value: r.value,
        raw: r.value,
        ci_halfwidth: r.ci_halfwidth,
        direct: None,
    }
}

fn scaled(r: &UStatResult, n: usize, k: usize) -> Result<FractionEstimate> {
    let s = scaled_fraction_bound(r.value, n, k)?;
    Ok(FractionEstimate {
        value: s.value,
        raw: s.raw,
        ci_halfwidth: (n - k) as f64 * r.ci_halfwidth,
        direct: None,
    })
}

/// Exact fractions of subsets failing the worst-case (∞-norm) projection
/// condition and of sign-subset pairs failing the small-projection one.
fn direct_counts(phi: &DMatrix<f64>, k: usize, a2: f64, a3: f64, tol: &Tolerances) -> Result<(f64, f64)> {
    let n = phi.ncols();
    let signs: Vec<DVector<f64>> = all_sign_vectors(k)?.into_iter().map(DVector::from_vec).collect();
    let mut idx: Vec<usize> = (0..k).collect();
    let (mut subsets, mut worst_fail, mut small_fail) = (0u64, 0u64, 0u64);
    loop {
        let pinv = pseudoinverse(&select_columns(phi, &idx), tol)?;
        let mut on = vec![false; n];
        for &i in &idx {
            on[i] = true;
        }
        let off: Vec<usize> = (0..n).filter(|&i| !on[i]).collect();
        let cross = pinv * select_columns(phi, &off);
        if cross.amax() > a3 {
            worst_fail += 1;
        }
        for b in &signs {
            if cross.tr_mul(b).amax() > a2 {
                small_fail += 1;
            }
        }
        subsets += 1;
        if !next_combination(&mut idx, n) {
            break;
        }
    }
    let s = subsets as f64;
    Ok((small_fail as f64 / (s * signs.len() as f64), worst_fail as f64 / s))
}

/// Fractions `u1, u2, u3` of subsets (or sign-subset pairs) failing the
/// invertibility, small-projection and worst-case-projection conditions.
///
/// `u2` and `u3` are the scaled U-statistic bounds; in exhaustive mode
/// they are accompanied by direct counts when `C(n,k)·2^k` is within the
/// enumeration cap. The worst-case kernel measures `‖Φ_S†φᵢ‖∞`, which is
/// what the scaled bound controls.
pub fn estimate_fractions(
    phi: &DMatrix<f64>,
    k: usize,
    consts: &ConditionConstants,
    mode: FractionMode,
) -> Result<FractionEstimates> {
    let n = phi.ncols();
    if k == 0 || k >= n {
        return Err(Error::OutOfRange(format!("need 1 <= k < n (k={k}, n={n})")));
    }
    let tol = Tolerances::default();
    let signs = SignMode::Exhaustive;
    let eig = Kernel::with_options(KernelId::EigMin, k, tol, signs)?;
    let small = Kernel::with_options(KernelId::SmallProj, k, tol, signs)?;
    let worst = Kernel::with_options(KernelId::WorstProj, k, tol, signs)?;
    let inv = Kernel::with_options(KernelId::InvProj, k, tol, signs)?;

    let a1_sq = consts.a1 * consts.a1;
    let u1 = unscaled(&run(phi, &eig, a1_sq, &mode, 1)?);
    let mut u2 = scaled(&run(phi, &small, consts.a2, &mode, 2)?, n, k)?;
    let mut u3 = scaled(&run(phi, &worst, consts.a3, &mode, 3)?, n, k)?;
    let u3_invproj = unscaled(&run(phi, &inv, consts.a3, &mode, 4)?);

    if mode == FractionMode::Exhaustive {
        let work = binomial(n as u64, k as u64)
            .and_then(|c| c.checked_mul(1u128 << k))
            .unwrap_or(u128::MAX);
        if work <= DEFAULT_ENUMERATION_CAP {
            let (d2, d3) = direct_counts(phi, k, consts.a2, consts.a3, &tol)?;
            u2.direct = Some(d2);
            u3.direct = Some(d3);
        }
    }
    Ok(FractionEstimates { u1, u2, u3, u3_invproj })
}
