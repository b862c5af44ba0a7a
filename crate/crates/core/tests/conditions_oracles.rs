mod common;

use cs_ustat::conditions::{check_theorem_b, check_theorem_c, cand1, ConditionConstants, LassoInputs};
use cs_ustat::ensembles::{sample_matrix, EnsembleSpec, Law};
use cs_ustat::linalg::{select_columns, Tolerances};
use cs_ustat::solvers::{solve_bp, thm_b_error_bounds, SolverTolerances};
use cs_ustat::SeedSpec;
use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;

fn l1(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().map(f64::abs).sum()
}

#[test]
fn theorem_b_margins_match_brute_force() {
    let tol = Tolerances::default();
    let (m, n, k) = (50, 100, 3);
    let consts = ConditionConstants { a1: 0.5, a2: 0.6, a3: 1.2 };
    for trial in 0..40u64 {
        let seed = SeedSpec::new(0xCB).child(trial);
        let mut rng = seed.rng();
        let phi = sample_matrix(&EnsembleSpec::new(Law::Gaussian, m, n), seed.child(1)).unwrap();
        let mut support = sample(&mut rng, n, k).into_vec();
        support.sort_unstable();
        let beta: Vec<f64> = (0..k).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();

        let phi_s = select_columns(&phi, &support);
        let sigma_min = common::jacobi_eigenvalues(&(phi_s.transpose() * &phi_s))[0].sqrt();
        let pinv = common::normal_equations_pinv(&phi_s).unwrap();
        let (mut small, mut worst): (f64, f64) = (0.0, 0.0);
        for i in (0..n).filter(|i| !support.contains(i)) {
            let p = &pinv * phi.column(i);
            small = small.max(p.iter().zip(&beta).map(|(x, b)| x * b).sum::<f64>().abs());
            worst = worst.max(l1(p.iter().copied()));
        }

        let r = check_theorem_b(&phi, &support, &beta, &consts, &tol).unwrap();
        assert!((r.invertibility.margin - (sigma_min - consts.a1)).abs() < 1e-9, "trial {trial}");
        assert!((r.small_projections.margin - (consts.a2 - small)).abs() < 1e-9, "trial {trial}");
        assert!((r.worst_case_projections.margin - (consts.a3 - worst)).abs() < 1e-9, "trial {trial}");
        assert_eq!(r.theorem_b(), sigma_min > consts.a1 && small <= consts.a2 && worst <= consts.a3);
    }
}

#[test]
fn single_off_support_column_by_hand() {
    // Φ_S = I, so Φ_S†φ₂ = φ₂ and (Φ_SᵀΦ_S)⁻¹β = β
    let phi = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.3, 0.0, 1.0, 0.4]);
    let (support, beta) = ([0, 1], [1.0, -1.0]);
    let tol = Tolerances::default();
    let consts = ConditionConstants { a1: 0.5, a2: 0.2, a3: 0.5 };
    let r = check_theorem_b(&phi, &support, &beta, &consts, &tol).unwrap();
    assert!((r.invertibility.margin - 0.5).abs() < 1e-12);
    assert!((r.small_projections.margin - 0.1).abs() < 1e-12);
    assert!((r.worst_case_projections.margin + 0.2).abs() < 1e-12);
    assert!(!r.theorem_b());

    let z = DVector::from_column_slice(&[1e-3, -2e-3]);
    let mags = [1.0, -1.0];
    let inputs = LassoInputs { z: &z, sigma_z: 0.01, a: 1.0, magnitudes: Some(&mags) };
    let c = check_theorem_c(&phi, &support, &beta, &inputs, &ConditionConstants { a1: 0.5, a2: 0.2, a3: 1.0 }, &tol)
        .unwrap();
    let inv = c.invertability_projections.unwrap();
    assert!(inv.pass && inv.margin.abs() < 1e-12);
    // Φ_S spans R², so the residual and hence noise condition ii) vanish
    assert_eq!(c.noise_ii, Some(true));
    // ‖z‖∞ = 0.002 ≤ 0.01·√(2 ln 3)/0.5 ≈ 0.0296
    assert_eq!(c.noise_i, Some(true));
    // threshold (2 + 4)·0.01·√(2 ln 3) ≈ 0.089
    assert_eq!(c.magnitude_condition, Some(true));
    assert_eq!(c.cand1, Some(cand1(1.0, 0.2)));
    assert!(c.theorem_c());
}

#[test]
fn basis_pursuit_respects_error_bounds_on_compressible_signals() {
    let tol = Tolerances::default();
    let stol = SolverTolerances::default();
    let (m, n, k) = (40, 100, 3);
    let consts = ConditionConstants { a1: 0.1, a2: 0.9, a3: 3.0 };
    let mut exercised = 0;
    for trial in 0..200u64 {
        let seed = SeedSpec::new(0xEB).child(trial);
        let mut rng = seed.rng();
        let phi = sample_matrix(&EnsembleSpec::new(Law::Gaussian, m, n), seed.child(1)).unwrap();
        let mut support = sample(&mut rng, n, k).into_vec();
        support.sort_unstable();
        // a k-sparse head of magnitude ≥ 1 plus a small dense tail
        let x: DVector<f64> = DVector::from_fn(n, |i, _| {
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            if support.contains(&i) {
                s * rng.random_range(1.0..2.0)
            } else {
                s * rng.random_range(0.0..0.01)
            }
        });
        let beta: Vec<f64> = support.iter().map(|&i| x[i].signum()).collect();
        if !check_theorem_b(&phi, &support, &beta, &consts, &tol).unwrap().theorem_b() {
            continue;
        }
        exercised += 1;
        let y = &phi * &x;
        let rep = solve_bp(&phi, &y, 0.0, &stol).unwrap();
        assert!(rep.converged, "trial {trial}");
        let h = &rep.x_star - &x;
        let on = l1(support.iter().map(|&i| h[i]));
        let off = l1((0..n).filter(|i| !support.contains(i)).map(|i| h[i]));
        let tail = l1((0..n).filter(|i| !support.contains(i)).map(|i| x[i]));
        let (on_bound, off_bound) = thm_b_error_bounds(consts.a2, consts.a3, tail).unwrap();
        assert!(on <= on_bound + 1e-9, "trial {trial}: {on} > {on_bound}");
        assert!(off <= off_bound + 1e-9, "trial {trial}: {off} > {off_bound}");
    }
    assert!(exercised >= 50, "only {exercised} instances passed the conditions");
}
