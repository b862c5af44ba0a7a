//! Independent reference implementations. Nothing here calls the library's
//! linear algebra, so agreement is evidence rather than tautology.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. `None` if a pivot falls below `1e-12` relative to the largest
/// entry.
pub fn gauss_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut rhs = b.clone();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))?;
        if m[(piv, col)].abs() < 1e-12 * scale {
            return None;
        }
        m.swap_rows(col, piv);
        rhs.swap_rows(col, piv);
        for r in col + 1..n {
            let f = m[(r, col)] / m[(col, col)];
            if f != 0.0 {
                for c in col..n {
                    m[(r, c)] -= f * m[(col, c)];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    let mut x = DVector::zeros(n);
    for r in (0..n).rev() {
        let mut acc = rhs[r];
        for c in r + 1..n {
            acc -= m[(r, c)] * x[c];
        }
        x[r] = acc / m[(r, r)];
    }
    Some(x)
}

/// `(AᵀA)⁻¹Aᵀ` via the normal equations; `None` if `AᵀA` is singular.
pub fn normal_equations_pinv(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let g = a.transpose() * a;
    let at = a.transpose();
    let mut out = DMatrix::zeros(a.ncols(), a.nrows());
    for j in 0..a.nrows() {
        let col = gauss_solve(&g, &at.column(j).into_owned())?;
        out.set_column(j, &col);
    }
    Some(out)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(s: &DMatrix<f64>) -> Vec<f64> {
    let n = s.nrows();
    let mut a = s.clone();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn subsets_up_to(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        if (mask.count_ones() as usize) <= max {
            out.push((0..n).filter(|&i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

/// Basis pursuit by enumerating every support of size at most `m` whose
/// columns fit `y` exactly; returns the feasible point of least `ℓ1` norm.
/// An LP optimum is always attained at such a basic solution.
pub fn bp_support_enumeration(phi: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let (m, n) = phi.shape();
    let mut best: Option<(f64, DVector<f64>)> = None;
    for t in subsets_up_to(n, m) {
        let a = DMatrix::from_fn(m, t.len(), |i, j| phi[(i, t[j])]);
        let g = a.transpose() * &a;
        let Some(xt) = gauss_solve(&g, &(a.transpose() * y)) else {
            continue;
        };
        if (&a * &xt - y).amax() > 1e-9 * (1.0 + y.amax()) {
            continue;
        }
        let cost: f64 = xt.iter().map(|v| v.abs()).sum();
        if best.as_ref().is_none_or(|(c, _)| cost < *c - 1e-12) {
            let mut x = DVector::zeros(n);
            for (p, &j) in t.iter().enumerate() {
                x[j] = xt[p];
            }
            best = Some((cost, x));
        }
    }
    best.map(|(_, x)| x).unwrap_or_else(|| DVector::zeros(n))
}

/// LASSO solution for an orthonormal design: `sgn(v)·max(|v| − λ, 0)` with
/// `v = Φᵀy`.
pub fn soft_threshold_oracle(phi: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> DVector<f64> {
    (phi.transpose() * y).map(|v| v.signum() * (v.abs() - lambda).max(0.0))
}
