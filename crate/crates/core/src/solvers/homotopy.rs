//! LASSO homotopy: the piecewise-linear solution path `x(λ)` traced from
//! `λ = ‖Φᵀy‖∞` downwards, with join and drop events at the breakpoints.
//!
//! Active coefficients are recomputed from scratch at every breakpoint, so
//! errors do not accumulate along the path.

use nalgebra::{DMatrix, DVector};

use super::{kkt_scale, l1, lasso_kkt_violation, SolverReport, SolverTolerances};
use crate::error::{Error, Result};
use crate::linalg::select_columns;

#[derive(Clone, Copy)]
enum Stop {
    Lambda(f64),
    Residual(f64),
}

enum Event {
    Stop,
    Join(usize, f64),
    Drop(usize),
}

struct PathEnd {
    x: DVector<f64>,
    lambda: f64,
    iterations: usize,
    capped: bool,
}

fn walk(phi: &DMatrix<f64>, y: &DVector<f64>, stop: Stop, tol: &SolverTolerances) -> Result<PathEnd> {
    let n = phi.ncols();
    let c0 = phi.tr_mul(y);
    let (j0, lambda0) = c0
        .iter()
        .enumerate()
        .map(|(j, v)| (j, v.abs()))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let zero = PathEnd {
        x: DVector::zeros(n),
        lambda: lambda0,
        iterations: 0,
        capped: false,
    };
    match stop {
        Stop::Lambda(t) if t >= lambda0 => return Ok(zero),
        Stop::Residual(eps) if eps >= y.norm() => return Ok(zero),
        _ => {}
    }
    let gtol = 1e-14 * lambda0;
    let mut active = vec![j0];
    let mut signs = vec![c0[j0].signum()];
    let mut in_active = vec![false; n];
    in_active[j0] = true;
    let mut lambda = lambda0;
    let mut blocked: Option<usize> = None;
    let mut iterations = 0usize;

    loop {
        iterations += 1;
        let phi_a = select_columns(phi, &active);
        let gram = phi_a.tr_mul(&phi_a);
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::Numerical("singular active Gram matrix".into()))?;
        let s = DVector::from_column_slice(&signs);
        let rhs = phi_a.tr_mul(y);
        let xa = chol.solve(&(&rhs - &s * lambda));
        let delta = chol.solve(&s);
        let r = y - &phi_a * &xa;
        let c = phi.tr_mul(&r);
        let v = &phi_a * &delta;
        let a = phi.tr_mul(&v);

        let (mut gamma, mut event) = match stop {
            Stop::Lambda(t) => (lambda - t, Event::Stop),
            Stop::Residual(_) => (lambda, Event::Stop),
        };
        if let Stop::Residual(eps) = stop {
            // ‖r − γv‖ = ε, smallest nonnegative root
            let vv = v.norm_squared();
            let rv = r.dot(&v);
            let disc = rv * rv - vv * (r.norm_squared() - eps * eps);
            if vv > 0.0 && disc >= 0.0 {
                let g = ((rv - disc.sqrt()) / vv).max(0.0);
                if g <= gamma {
                    gamma = g;
                }
            }
        }
        for j in 0..n {
            if in_active[j] || blocked == Some(j) {
                continue;
            }
            for sg in [1.0, -1.0] {
                let den = 1.0 - sg * a[j];
                if den > 1e-14 {
                    let g = (lambda - sg * c[j]) / den;
                    if g > gtol && g < gamma {
                        gamma = g;
                        event = Event::Join(j, sg);
                    }
                }
            }
        }
        for (pos, (&xi, &di)) in xa.iter().zip(delta.iter()).enumerate() {
            if di != 0.0 {
                let g = -xi / di;
                if g > gtol && g < gamma {
                    gamma = g;
                    event = Event::Drop(pos);
                }
            }
        }

        lambda -= gamma;
        let xa_new = &xa + &delta * gamma;
        let finished = matches!(event, Event::Stop) || lambda <= 0.0;
        if finished || iterations >= tol.max_iter {
            let mut x = DVector::zeros(n);
            for (p, &j) in active.iter().enumerate() {
                x[j] = xa_new[p];
            }
            return Ok(PathEnd {
                x,
                lambda: lambda.max(0.0),
                iterations,
                capped: !finished,
            });
        }
        match event {
            Event::Join(j, sg) => {
                active.push(j);
                signs.push(sg);
                in_active[j] = true;
                blocked = None;
            }
            Event::Drop(pos) => {
                let j = active.remove(pos);
                signs.remove(pos);
                in_active[j] = false;
                blocked = Some(j);
            }
            Event::Stop => unreachable!(),
        }
    }
}

pub(super) fn lasso(phi: &DMatrix<f64>, y: &DVector<f64>, lambda: f64, tol: &SolverTolerances) -> Result<SolverReport> {
    let end = walk(phi, y, Stop::Lambda(lambda), tol)?;
    let x = end.x;
    let kkt = lasso_kkt_violation(phi, y, lambda, &x) / kkt_scale(phi, y);
    let r = y - phi * &x;
    Ok(SolverReport {
        objective: 0.5 * r.norm_squared() + lambda * l1(&x),
        x_star: x,
        kkt_residual: kkt,
        iterations: end.iterations,
        converged: !end.capped && kkt <= tol.kkt_tol,
    })
}

pub(super) fn bpdn(phi: &DMatrix<f64>, y: &DVector<f64>, epsilon: f64, tol: &SolverTolerances) -> Result<SolverReport> {
    let end = walk(phi, y, Stop::Residual(epsilon), tol)?;
    let x = end.x;
    let resid = (y - phi * &x).norm();
    if resid > epsilon * (1.0 + 1e-9) + tol.feasibility_tol && !end.capped {
        return Err(Error::Infeasible(resid));
    }
    let scale = kkt_scale(phi, y);
    let kkt = (lasso_kkt_violation(phi, y, end.lambda, &x) / scale).max((resid - epsilon).max(0.0) / epsilon.max(1.0));
    Ok(SolverReport {
        objective: l1(&x),
        x_star: x,
        kkt_residual: kkt,
        iterations: end.iterations,
        converged: !end.capped && kkt <= tol.kkt_tol,
    })
}
