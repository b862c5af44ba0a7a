//! Cyclic coordinate descent for LASSO, used when the homotopy path breaks
//! down (collinear active columns).

use nalgebra::{DMatrix, DVector};

use super::{kkt_scale, l1, lasso_kkt_violation, SolverReport, SolverTolerances};

const CHECK_EVERY: usize = 10;

fn soft(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

pub(super) fn lasso(phi: &DMatrix<f64>, y: &DVector<f64>, lambda: f64, x0: DVector<f64>, tol: &SolverTolerances) -> SolverReport {
    let n = phi.ncols();
    let scale = kkt_scale(phi, y);
    let norms: Vec<f64> = (0..n).map(|j| phi.column(j).norm_squared()).collect();
    let mut x = x0;
    let mut r = y - phi * &x;
    let mut sweeps = 0usize;
    let mut kkt = f64::INFINITY;
    while sweeps < tol.max_iter {
        sweeps += 1;
        for j in 0..n {
            if norms[j] == 0.0 {
                x[j] = 0.0;
                continue;
            }
            let col = phi.column(j);
            let old = x[j];
            let rho = col.dot(&r) + norms[j] * old;
            let new = soft(rho, lambda) / norms[j];
            if new != old {
                r.axpy(old - new, &col, 1.0);
                x[j] = new;
            }
        }
        if sweeps.is_multiple_of(CHECK_EVERY) {
            // refresh the residual so drift never masks a KKT violation
            r = y - phi * &x;
            kkt = lasso_kkt_violation(phi, y, lambda, &x) / scale;
            if kkt <= tol.kkt_tol {
                break;
            }
        }
    }
    if kkt.is_infinite() {
        kkt = lasso_kkt_violation(phi, y, lambda, &x) / scale;
    }
    SolverReport {
        objective: 0.5 * (y - phi * &x).norm_squared() + lambda * l1(&x),
        x_star: x,
        kkt_residual: kkt,
        iterations: sweeps,
        converged: kkt <= tol.kkt_tol,
    }
}
