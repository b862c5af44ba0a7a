//! Bounded kernels `g(A, a) ∈ [0, 1]` on column submatrices.
//!
//! Every kernel here is a (weighted) average of tail indicators of some
//! statistic of the submatrix. Evaluating over a whole threshold grid
//! computes the statistics once and counts exceedances per grid point,
//! which is what the U-statistic sweeps rely on.
//!
//! | kernel      | width | statistic(s)                                   | indicator   |
//! |-------------|-------|------------------------------------------------|-------------|
//! | `EigMax`    | k     | σ²max(A)                                       | `≤ a`       |
//! | `EigMin`    | k     | σ²min(A)                                       | `≤ a`       |
//! | `WorstProj` | k+1   | ‖A†_{R∖j} a_j‖∞ for each holdout j             | `> a`       |
//! | `SmallProj` | k+1   | \|(A†_{R∖j} a_j)ᵀβ\| for each holdout j, sign β | `> a`       |
//! | `InvProj`   | k     | ‖(AᵀA)†β‖∞ for each sign β                     | `> a`       |

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gram_pseudoinverse, max_abs, pseudoinverse, svd_extremes, Tolerances};
use crate::rng::SeedSpec;

/// Largest `k` for which sign vectors are enumerated exhaustively.
pub const K_MAX_SIGNS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelId {
    EigMax,
    EigMin,
    WorstProj,
    SmallProj,
    InvProj,
}

impl KernelId {
    /// Number of columns the kernel consumes for subset size `k`.
    pub fn width(&self, k: usize) -> usize {
        match self {
            KernelId::EigMax | KernelId::EigMin | KernelId::InvProj => k,
            KernelId::WorstProj | KernelId::SmallProj => k + 1,
        }
    }

    pub fn uses_signs(&self) -> bool {
        matches!(self, KernelId::SmallProj | KernelId::InvProj)
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelId::EigMax => "eigmax",
            KernelId::EigMin => "eigmin",
            KernelId::WorstProj => "worstproj",
            KernelId::SmallProj => "smallproj",
            KernelId::InvProj => "invproj",
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "eigmax" => Ok(KernelId::EigMax),
            "eigmin" => Ok(KernelId::EigMin),
            "worstproj" => Ok(KernelId::WorstProj),
            "smallproj" => Ok(KernelId::SmallProj),
            "invproj" => Ok(KernelId::InvProj),
            other => Err(Error::Parse(format!("unknown kernel '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigWhich {
    Max,
    Min,
}

/// How sign-vector kernels cover `{-1, +1}^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignMode {
    /// All `2^k` sign vectors; only allowed for `k <= K_MAX_SIGNS`.
    Exhaustive,
    /// A fixed uniform sample of sign vectors, drawn once per kernel.
    Sampled { trials: usize, seed: SeedSpec },
}

/// A column-order-invariant map from a submatrix and threshold to `[0, 1]`.
pub trait BoundedKernel: Sync {
    /// Number of columns the kernel consumes.
    fn width(&self) -> usize;

    /// Subset size `k` the kernel is indexed by (equal to the width unless
    /// the kernel takes a held-out column).
    fn subset_size(&self) -> usize {
        self.width()
    }

    fn label(&self) -> String;

    /// Kernel values at every threshold of `grid`.
    fn eval_grid(&self, a: &DMatrix<f64>, grid: &[f64]) -> Result<Vec<f64>>;

    fn eval(&self, a: &DMatrix<f64>, threshold: f64) -> Result<f64> {
        Ok(self.eval_grid(a, &[threshold])?[0])
    }

    /// True when the kernel value is itself a Monte Carlo estimate.
    fn is_sampled(&self) -> bool {
        false
    }
}

/// One of the five library kernels at a fixed subset size.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub id: KernelId,
    pub k: usize,
    pub tol: Tolerances,
    signs: Option<Vec<Vec<f64>>>,
    sampled: bool,
}

impl Kernel {
    pub fn new(id: KernelId, k: usize) -> Result<Self> {
        Self::with_options(id, k, Tolerances::default(), SignMode::Exhaustive)
    }

    pub fn with_options(id: KernelId, k: usize, tol: Tolerances, mode: SignMode) -> Result<Self> {
        if k == 0 {
            return Err(Error::OutOfRange("kernel subset size k must be at least 1".into()));
        }
        tol.validate()?;
        let (signs, sampled) = if id.uses_signs() {
            match mode {
                SignMode::Exhaustive => (Some(all_sign_vectors(k)?), false),
                SignMode::Sampled { trials, seed } => {
                    if trials == 0 {
                        return Err(Error::OutOfRange("sampled sign mode needs trials >= 1".into()));
                    }
                    (Some(sample_sign_vectors(k, trials, seed)), true)
                }
            }
        } else {
            (None, false)
        };
        Ok(Self {
            id,
            k,
            tol,
            signs,
            sampled,
        })
    }

    /// Raw statistics whose exceedance indicators the kernel averages,
    /// together with the direction of the indicator.
    fn statistics(&self, a: &DMatrix<f64>) -> Result<(Vec<f64>, Tail)> {
        let w = self.width();
        if a.ncols() != w {
            return Err(Error::WidthMismatch {
                expected: w,
                got: a.ncols(),
            });
        }
        match self.id {
            KernelId::EigMax => Ok((vec![svd_extremes(a, &self.tol)?.sigma2_max], Tail::AtMost)),
            KernelId::EigMin => Ok((vec![svd_extremes(a, &self.tol)?.sigma2_min], Tail::AtMost)),
            KernelId::WorstProj => {
                let proj = leave_one_out_projections(a, &self.tol)?;
                Ok((proj.iter().map(max_abs).collect(), Tail::Above))
            }
            KernelId::SmallProj => {
                let proj = leave_one_out_projections(a, &self.tol)?;
                let signs = self.signs.as_ref().expect("sign kernel has signs");
                let mut vals = Vec::with_capacity(proj.len() * signs.len());
                for p in &proj {
                    for beta in signs {
                        let dot: f64 = p.iter().zip(beta).map(|(x, b)| x * b).sum();
                        vals.push(dot.abs());
                    }
                }
                Ok((vals, Tail::Above))
            }
            KernelId::InvProj => {
                let gp = gram_pseudoinverse(a, &self.tol)?;
                let signs = self.signs.as_ref().expect("sign kernel has signs");
                let vals = signs
                    .iter()
                    .map(|beta| {
                        let b = DVector::from_column_slice(beta);
                        max_abs(&(&gp * b))
                    })
                    .collect();
                Ok((vals, Tail::Above))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Tail {
    /// indicator `stat <= a`
    AtMost,
    /// indicator `stat > a`
    Above,
}

fn tail_fractions(mut vals: Vec<f64>, tail: Tail, grid: &[f64]) -> Vec<f64> {
    vals.sort_by(|x, y| x.total_cmp(y));
    let total = vals.len() as f64;
    grid.iter()
        .map(|&a| {
            let at_most = vals.partition_point(|&v| v <= a) as f64;
            match tail {
                Tail::AtMost => at_most / total,
                Tail::Above => (total - at_most) / total,
            }
        })
        .collect()
}

impl BoundedKernel for Kernel {
    fn width(&self) -> usize {
        self.id.width(self.k)
    }

    fn subset_size(&self) -> usize {
        self.k
    }

    fn label(&self) -> String {
        self.id.name().to_string()
    }

    fn eval_grid(&self, a: &DMatrix<f64>, grid: &[f64]) -> Result<Vec<f64>> {
        let (vals, tail) = self.statistics(a)?;
        Ok(tail_fractions(vals, tail, grid))
    }

    fn is_sampled(&self) -> bool {
        self.sampled
    }
}

/// Every vector of `{-1, +1}^k`; bit `i` of the index sets entry `i` to `+1`.
pub fn all_sign_vectors(k: usize) -> Result<Vec<Vec<f64>>> {
    if k > K_MAX_SIGNS {
        return Err(Error::SignCapExceeded { k, cap: K_MAX_SIGNS });
    }
    Ok((0..1usize << k)
        .map(|l| (0..k).map(|i| if (l >> i) & 1 == 1 { 1.0 } else { -1.0 }).collect())
        .collect())
}

fn sample_sign_vectors(k: usize, trials: usize, seed: SeedSpec) -> Vec<Vec<f64>> {
    let mut rng = seed.rng();
    (0..trials)
        .map(|_| (0..k).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect())
        .collect()
}

/// `A†_{R∖{j}} a_j` for every column `j` of `A`.
pub fn leave_one_out_projections(a: &DMatrix<f64>, tol: &Tolerances) -> Result<Vec<DVector<f64>>> {
    let w = a.ncols();
    (0..w)
        .map(|j| {
            let rest = a.clone().remove_column(j);
            let pinv = pseudoinverse(&rest, tol)?;
            Ok(pinv * a.column(j))
        })
        .collect()
}

/// `1{σ²max(A) ≤ a}` or `1{σ²min(A) ≤ a}`.
pub fn kernel_eig(a: &DMatrix<f64>, threshold: f64, which: EigWhich) -> Result<f64> {
    let e = svd_extremes(a, &Tolerances::default())?;
    let stat = match which {
        EigWhich::Max => e.sigma2_max,
        EigWhich::Min => e.sigma2_min,
    };
    Ok(if stat <= threshold { 1.0 } else { 0.0 })
}

fn check_proj_width(a: &DMatrix<f64>) -> Result<usize> {
    if a.ncols() < 2 {
        return Err(Error::InvalidDimensions("projection kernels need k+1 >= 2 columns".into()));
    }
    Ok(a.ncols() - 1)
}

/// Fraction of holdouts `j` with `‖A†_{R∖j} a_j‖∞ > a`; `A` has `k+1` columns.
pub fn kernel_worst_proj(a: &DMatrix<f64>, threshold: f64, tol: &Tolerances) -> Result<f64> {
    let k = check_proj_width(a)?;
    Kernel::with_options(KernelId::WorstProj, k, *tol, SignMode::Exhaustive)?.eval(a, threshold)
}

/// Fraction of (sign, holdout) pairs with `|(A†_{R∖j} a_j)ᵀβ| > a`; `A` has `k+1` columns.
pub fn kernel_small_proj(a: &DMatrix<f64>, threshold: f64, tol: &Tolerances) -> Result<f64> {
    let k = check_proj_width(a)?;
    Kernel::with_options(KernelId::SmallProj, k, *tol, SignMode::Exhaustive)?.eval(a, threshold)
}

/// Fraction of signs `β` with `‖(AᵀA)†β‖∞ > a`; `A` has `k` columns.
pub fn kernel_inv_proj(a: &DMatrix<f64>, threshold: f64, tol: &Tolerances) -> Result<f64> {
    if a.ncols() == 0 {
        return Err(Error::InvalidDimensions("empty matrix".into()));
    }
    Kernel::with_options(KernelId::InvProj, a.ncols(), *tol, SignMode::Exhaustive)?.eval(a, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(m: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(m);
        v[i] = 1.0;
        v
    }

    fn cols(c: &[DVector<f64>]) -> DMatrix<f64> {
        DMatrix::from_columns(c)
    }

    #[test]
    fn eig_identity() {
        let i2 = DMatrix::<f64>::identity(2, 2);
        assert_eq!(kernel_eig(&i2, 1.5, EigWhich::Max).unwrap(), 1.0);
        assert_eq!(kernel_eig(&i2, 0.5, EigWhich::Min).unwrap(), 0.0);
    }

    #[test]
    fn worst_proj_orthogonal_and_duplicate() {
        let tol = Tolerances::default();
        assert_eq!(kernel_worst_proj(&cols(&[e(3, 0), e(3, 1)]), 0.5, &tol).unwrap(), 0.0);
        assert_eq!(kernel_worst_proj(&cols(&[e(3, 0), e(3, 0)]), 0.5, &tol).unwrap(), 1.0);
    }

    #[test]
    fn small_proj_orthogonal_and_duplicate() {
        let tol = Tolerances::default();
        assert_eq!(kernel_small_proj(&cols(&[e(3, 0), e(3, 1)]), 0.5, &tol).unwrap(), 0.0);
        assert_eq!(kernel_small_proj(&cols(&[e(3, 0), e(3, 0)]), 0.5, &tol).unwrap(), 1.0);
    }

    #[test]
    fn inv_proj_orthonormal() {
        let tol = Tolerances::default();
        let a = cols(&[e(4, 0), e(4, 1), e(4, 3)]);
        assert_eq!(kernel_inv_proj(&a, 1.5, &tol).unwrap(), 0.0);
        assert_eq!(kernel_inv_proj(&a, 0.5, &tol).unwrap(), 1.0);
    }

    #[test]
    fn sign_cap() {
        assert!(matches!(
            Kernel::new(KernelId::SmallProj, K_MAX_SIGNS + 1),
            Err(Error::SignCapExceeded { .. })
        ));
        let sampled = Kernel::with_options(
            KernelId::InvProj,
            K_MAX_SIGNS + 1,
            Tolerances::default(),
            SignMode::Sampled {
                trials: 16,
                seed: SeedSpec::new(1),
            },
        )
        .unwrap();
        assert!(sampled.is_sampled());
    }

    #[test]
    fn width_mismatch() {
        let k = Kernel::new(KernelId::WorstProj, 2).unwrap();
        let a = DMatrix::<f64>::identity(4, 2);
        assert!(matches!(k.eval(&a, 1.0), Err(Error::WidthMismatch { expected: 3, got: 2 })));
    }

    #[test]
    fn sign_vectors_enumerated() {
        let s = all_sign_vectors(3).unwrap();
        assert_eq!(s.len(), 8);
        let mut uniq = s.clone();
        uniq.sort_by(|a, b| a.partial_cmp(b).unwrap());
        uniq.dedup();
        assert_eq!(uniq.len(), 8);
    }
}
