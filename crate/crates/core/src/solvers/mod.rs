//! Basis pursuit, BPDN and LASSO solvers with optimality certificates.
//!
//! * `ε = 0` basis pursuit is solved exactly as a linear program
//!   ([`simplex`]); the final simplex multipliers are the dual certificate.
//! * LASSO (`½‖y − Φx‖² + λ‖x‖₁`) follows the homotopy path from
//!   `λ = ‖Φᵀy‖∞` down to the target ([`homotopy`]), falling back to
//!   warm-started coordinate descent ([`cd`]) if the path breaks down.
//! * `ε > 0` basis pursuit denoising walks the same path and stops where the
//!   residual norm reaches `ε`.
//!
//! Every solve ends with an independent KKT check; a report with
//! `converged = true` always has `kkt_residual <= tol.kkt_tol`.

mod cd;
mod homotopy;
pub mod instance;
mod simplex;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use instance::{read_instance, write_instance, InstanceData, RecoveryInstance};

/// Solver tolerances and iteration caps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverTolerances {
    /// Largest KKT residual accepted as optimal. Relative to `max(1, ‖Φᵀy‖∞)`.
    pub kkt_tol: f64,
    /// Least-squares residual above which `Φx = y` is declared infeasible.
    pub feasibility_tol: f64,
    /// Cap on simplex pivots, homotopy breakpoints or coordinate sweeps.
    pub max_iter: usize,
}

impl Default for SolverTolerances {
    fn default() -> Self {
        Self {
            kkt_tol: 1e-8,
            feasibility_tol: 1e-8,
            max_iter: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub x_star: DVector<f64>,
    pub objective: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn check_shapes(phi: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
    if phi.nrows() == 0 || phi.ncols() == 0 {
        return Err(Error::InvalidDimensions("empty sensing matrix".into()));
    }
    if phi.nrows() != y.len() {
        return Err(Error::InvalidDimensions(format!(
            "Phi has {} rows but y has length {}",
            phi.nrows(),
            y.len()
        )));
    }
    Ok(())
}

fn kkt_scale(phi: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    (phi.transpose() * y).amax().max(1.0)
}

fn l1(x: &DVector<f64>) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// `min ‖x‖₁ s.t. ‖y − Φx‖₂ ≤ ε`.
pub fn solve_bp(phi: &DMatrix<f64>, y: &DVector<f64>, epsilon: f64, tol: &SolverTolerances) -> Result<SolverReport> {
    check_shapes(phi, y)?;
    if !(epsilon >= 0.0) {
        return Err(Error::OutOfRange(format!("epsilon={epsilon} must be nonnegative")));
    }
    let n = phi.ncols();
    let y_norm = y.norm();
    if y_norm <= epsilon {
        return Ok(SolverReport {
            x_star: DVector::zeros(n),
            objective: 0.0,
            kkt_residual: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    if epsilon == 0.0 {
        let resid = least_squares_residual(phi, y)?;
        if resid > tol.feasibility_tol * y_norm.max(1.0) {
            return Err(Error::Infeasible(resid));
        }
        return simplex::basis_pursuit(phi, y, tol);
    }
    homotopy::bpdn(phi, y, epsilon, tol)
}

/// `min ½‖y − Φx‖₂² + λ‖x‖₁`.
pub fn solve_lasso(phi: &DMatrix<f64>, y: &DVector<f64>, lambda: f64, tol: &SolverTolerances) -> Result<SolverReport> {
    check_shapes(phi, y)?;
    if !(lambda > 0.0) {
        return Err(Error::OutOfRange(format!("lambda={lambda} must be positive")));
    }
    let path = homotopy::lasso(phi, y, lambda, tol);
    let (x0, iters) = match path {
        Ok(rep) if rep.converged => return Ok(rep),
        Ok(rep) => (rep.x_star, rep.iterations),
        Err(_) => (DVector::zeros(phi.ncols()), 0),
    };
    let mut rep = cd::lasso(phi, y, lambda, x0, tol);
    rep.iterations += iters;
    rep.converged = rep.kkt_residual <= tol.kkt_tol;
    Ok(rep)
}

fn least_squares_residual(phi: &DMatrix<f64>, y: &DVector<f64>) -> Result<f64> {
    let svd = phi.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return Ok(y.norm());
    }
    let x = svd
        .solve(y, 1e-12 * smax)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    Ok((y - phi * x).norm())
}

/// Subgradient optimality of `x_star` for the LASSO objective: on the
/// support `φᵢᵀr = λ·sgn(xᵢ)`, off it `|φᵢᵀr| ≤ λ`, both to `tol`.
/// Returns the verdict and the worst violation.
pub fn verify_lasso_kkt(phi: &DMatrix<f64>, y: &DVector<f64>, lambda: f64, x_star: &DVector<f64>, tol: f64) -> (bool, f64) {
    let v = lasso_kkt_violation(phi, y, lambda, x_star);
    (v <= tol, v)
}

pub(crate) fn lasso_kkt_violation(phi: &DMatrix<f64>, y: &DVector<f64>, lambda: f64, x: &DVector<f64>) -> f64 {
    let r = y - phi * x;
    let c = phi.transpose() * r;
    c.iter()
        .zip(x.iter())
        .map(|(&ci, &xi)| {
            if xi != 0.0 {
                (ci - lambda * xi.signum()).abs()
            } else {
                (ci.abs() - lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// True iff `{i : |xᵢ| > zero_tol} = S` and the signs on `S` equal `beta`.
/// `support` and `beta` are aligned entry by entry.
pub fn pattern_match(x_star: &DVector<f64>, support: &[usize], beta: &[f64], zero_tol: f64) -> bool {
    if support.len() != beta.len() {
        return false;
    }
    let detected = x_star.iter().filter(|v| v.abs() > zero_tol).count();
    if detected != support.len() {
        return false;
    }
    support.iter().zip(beta).all(|(&i, &b)| {
        i < x_star.len() && x_star[i].abs() > zero_tol && x_star[i].signum() == b.signum()
    })
}

/// Error bounds `(2a₃/(1−a₂)·e, 2/(1−a₂)·e)` on and off the support for
/// basis pursuit, given the best-k approximation error `e`.
pub fn thm_b_error_bounds(a2: f64, a3: f64, best_k_error: f64) -> Result<(f64, f64)> {
    if !(a2 > 0.0 && a2 < 1.0) {
        return Err(Error::OutOfRange(format!("a2={a2} must lie in (0, 1)")));
    }
    let f = 2.0 * best_k_error / (1.0 - a2);
    Ok((a3 * f, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn bp_zero_measurement() {
        let phi = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.5, 0.0, 1.0, 0.5]);
        let rep = solve_bp(&phi, &v(&[0.0, 0.0]), 0.0, &SolverTolerances::default()).unwrap();
        assert_eq!(rep.x_star, DVector::zeros(3));
    }

    #[test]
    fn bp_prefers_unit_column() {
        let h = 0.5f64.sqrt();
        let phi = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, h, 0.0, 1.0, h]);
        let rep = solve_bp(&phi, &v(&[1.0, 0.0]), 0.0, &SolverTolerances::default()).unwrap();
        assert!(rep.converged);
        assert_relative_eq!(rep.x_star, v(&[1.0, 0.0, 0.0]), epsilon = 1e-12);
        assert_relative_eq!(rep.objective, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bp_infeasible() {
        let phi = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        let err = solve_bp(&phi, &v(&[0.0, 1.0]), 0.0, &SolverTolerances::default());
        assert!(matches!(err, Err(Error::Infeasible(_))));
    }

    #[test]
    fn bpdn_inside_ball_is_zero() {
        let phi = DMatrix::identity(2, 2);
        let rep = solve_bp(&phi, &v(&[0.3, 0.4]), 0.5, &SolverTolerances::default()).unwrap();
        assert_eq!(rep.x_star, DVector::zeros(2));
    }

    #[test]
    fn bpdn_identity_shrinks() {
        // with Phi = I the solution soft-thresholds y at λ where ‖r‖ = ε;
        // here r = (λ, 0.5), so λ = √0.75
        let phi = DMatrix::identity(2, 2);
        let rep = solve_bp(&phi, &v(&[3.0, 0.5]), 1.0, &SolverTolerances::default()).unwrap();
        assert!(rep.converged);
        assert_relative_eq!(rep.x_star, v(&[3.0 - 0.75f64.sqrt(), 0.0]), epsilon = 1e-10);
    }

    #[test]
    fn lasso_large_lambda_is_zero() {
        let phi = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.0, 1.0]);
        let y = v(&[1.0, -1.0]);
        let lmax = (phi.transpose() * &y).amax();
        let rep = solve_lasso(&phi, &y, lmax, &SolverTolerances::default()).unwrap();
        assert_eq!(rep.x_star, DVector::zeros(2));
    }

    #[test]
    fn lasso_soft_threshold() {
        let rep = solve_lasso(&DMatrix::identity(2, 2), &v(&[3.0, 0.5]), 1.0, &SolverTolerances::default()).unwrap();
        assert!(rep.converged);
        assert_relative_eq!(rep.x_star, v(&[2.0, 0.0]), epsilon = 1e-12);
    }

    #[test]
    fn kkt_examples() {
        let phi = DMatrix::identity(2, 2);
        let y = v(&[3.0, 0.5]);
        assert!(verify_lasso_kkt(&phi, &y, 3.0, &DVector::zeros(2), 1e-12).0);
        assert!(!verify_lasso_kkt(&phi, &y, 2.9, &DVector::zeros(2), 1e-12).0);
        let good = v(&[2.0, 0.0]);
        assert!(verify_lasso_kkt(&phi, &y, 1.0, &good, 1e-12).0);
        let bad = v(&[2.0, 0.1]);
        assert!(!verify_lasso_kkt(&phi, &y, 1.0, &bad, 1e-6).0);
    }

    #[test]
    fn pattern_examples() {
        let x = v(&[0.0, 1.5, 0.0, -0.2]);
        assert!(pattern_match(&x, &[1, 3], &[1.0, -1.0], 1e-6));
        assert!(!pattern_match(&DVector::zeros(4), &[1, 3], &[1.0, -1.0], 1e-6));
        assert!(!pattern_match(&x, &[1, 3], &[1.0, 1.0], 1e-6));
        assert!(!pattern_match(&x, &[1], &[1.0], 1e-6));
    }

    #[test]
    fn error_bound_examples() {
        assert_eq!(thm_b_error_bounds(0.5, 2.0, 0.0).unwrap(), (0.0, 0.0));
        assert_eq!(thm_b_error_bounds(0.5, 2.0, 1.0).unwrap(), (8.0, 4.0));
        assert!(thm_b_error_bounds(1.0, 2.0, 1.0).is_err());
    }
}
