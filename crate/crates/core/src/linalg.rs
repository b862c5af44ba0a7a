//! Dense linear algebra on small column submatrices.

use nalgebra::{DMatrix, DVector, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by kernels and solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative accuracy required of singular values.
    pub svd_rel_tol: f64,
    /// Singular values below `rank_tol * sigma_max` are treated as zero.
    pub rank_tol: f64,
    /// Magnitude below which a solver coefficient counts as zero.
    pub zero_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            svd_rel_tol: 1e-10,
            rank_tol: 1e-9,
            zero_tol: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        if self.svd_rel_tol > 0.0 && self.rank_tol > 0.0 && self.zero_tol > 0.0 {
            Ok(())
        } else {
            Err(Error::OutOfRange("tolerances must be strictly positive".into()))
        }
    }
}

/// Extreme squared singular values of a matrix, i.e. the extreme
/// eigenvalues of its Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdExtremes {
    pub sigma2_min: f64,
    pub sigma2_max: f64,
}

fn svd(a: &DMatrix<f64>, vectors: bool) -> Result<SVD<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    // a bare machine epsilon stalls the bidiagonal sweep on rank-deficient input
    let svd = SVD::try_new(a.clone(), vectors, vectors, 5.0 * f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD failed to converge".into()))?;
    if svd.singular_values.len() != a.nrows().min(a.ncols()) || svd.singular_values.iter().any(|s| !s.is_finite()) {
        return Err(Error::Numerical("SVD returned malformed singular values".into()));
    }
    Ok(svd)
}

fn check_nonempty(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        Err(Error::InvalidDimensions(format!("empty {}x{} matrix", a.nrows(), a.ncols())))
    } else {
        Ok(())
    }
}

/// Smallest and largest eigenvalues of `AᵀA`. For wide inputs (more
/// columns than rows) the Gram matrix is singular and `sigma2_min` is 0.
pub fn svd_extremes(a: &DMatrix<f64>, tol: &Tolerances) -> Result<SvdExtremes> {
    check_nonempty(a)?;
    tol.validate()?;
    let s = svd(a, false)?.singular_values;
    let smax = s.max();
    let smin = if a.ncols() > a.nrows() { 0.0 } else { s.min() };
    Ok(SvdExtremes {
        sigma2_min: smin * smin,
        sigma2_max: smax * smax,
    })
}

/// Moore-Penrose pseudoinverse via SVD, zeroing singular values below
/// `rank_tol * sigma_max`.
pub fn pseudoinverse(a: &DMatrix<f64>, tol: &Tolerances) -> Result<DMatrix<f64>> {
    let (m, k) = a.shape();
    if m == 0 || k == 0 {
        return Ok(DMatrix::zeros(k, m));
    }
    let dec = svd(a, true)?;
    let u = dec.u.as_ref().expect("u requested");
    let vt = dec.v_t.as_ref().expect("v_t requested");
    let smax = dec.singular_values.max();
    if smax == 0.0 {
        return Ok(DMatrix::zeros(k, m));
    }
    let cut = tol.rank_tol * smax;
    let mut out = DMatrix::<f64>::zeros(k, m);
    for (r, &s) in dec.singular_values.iter().enumerate() {
        if s > cut {
            let vr = vt.row(r).transpose();
            let ur = u.column(r).transpose();
            out += (vr * ur) / s;
        }
    }
    Ok(out)
}

/// Pseudoinverse of the Gram matrix `(AᵀA)†`, computed from the SVD of `A`.
pub fn gram_pseudoinverse(a: &DMatrix<f64>, tol: &Tolerances) -> Result<DMatrix<f64>> {
    let k = a.ncols();
    check_nonempty(a)?;
    let dec = svd(a, true)?;
    let vt = dec.v_t.as_ref().expect("v_t requested");
    let smax = dec.singular_values.max();
    let mut out = DMatrix::<f64>::zeros(k, k);
    if smax == 0.0 {
        return Ok(out);
    }
    let cut = tol.rank_tol * smax;
    for (r, &s) in dec.singular_values.iter().enumerate() {
        if s > cut {
            let vr = vt.row(r).transpose();
            out += (&vr * vr.transpose()) / (s * s);
        }
    }
    Ok(out)
}

/// Copy the listed columns, in order, into a new matrix.
pub fn select_columns(phi: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(phi.nrows(), idx.len(), |i, j| phi[(i, idx[j])])
}

pub fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}
