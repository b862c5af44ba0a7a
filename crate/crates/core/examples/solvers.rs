//! Basis pursuit, BPDN and LASSO on one noisy instance, with optimality
//! checks and a round trip through the instance file format.

use cs_ustat::bounds::lasso_lambda;
use cs_ustat::conditions::{sample_instance, Algorithm, ExperimentConfig, SignalModel};
use cs_ustat::ensembles::{EnsembleSpec, Law};
use cs_ustat::solvers::instance::{read_instance_from, write_instance_to};
use cs_ustat::solvers::{pattern_match, solve_bp, solve_lasso, verify_lasso_kkt, InstanceData, SolverTolerances};
use cs_ustat::SeedSpec;

fn main() -> cs_ustat::Result<()> {
    let (m, n, k, sigma) = (60, 200, 5, 0.001);
    let mut config = ExperimentConfig::new(EnsembleSpec::new(Law::Gaussian, m, n), k, 1, Algorithm::Lasso, SeedSpec::new(15));
    config.signal_model = SignalModel::PlusMinusOne;
    config.sigma_z = sigma;
    let inst = sample_instance(&config, 0)?;
    let tol = SolverTolerances::default();
    let report = |name: &str, x: &nalgebra::DVector<f64>, kkt: f64, iters: usize| {
        let err = (x - &inst.x_true).amax();
        let ok = pattern_match(x, &inst.support, &inst.beta, config.zero_tol);
        let nnz = x.iter().filter(|v| v.abs() > config.zero_tol).count();
        println!("{name:<6} ‖x* − x‖∞ = {err:.2e}  nonzeros {nnz:>3}  pattern {ok:<5}  kkt {kkt:.1e}  iterations {iters}");
    };

    let bp = solve_bp(&inst.phi, &inst.y_clean, 0.0, &tol)?;
    report("bp", &bp.x_star, bp.kkt_residual, bp.iterations);
    let bpdn = solve_bp(&inst.phi, &inst.y_noisy, inst.z.norm(), &tol)?;
    report("bpdn", &bpdn.x_star, bpdn.kkt_residual, bpdn.iterations);
    let lambda = lasso_lambda(sigma, config.lasso_a, n);
    println!("λ = {lambda:.4}");
    let lasso = solve_lasso(&inst.phi, &inst.y_noisy, lambda, &tol)?;
    report("lasso", &lasso.x_star, lasso.kkt_residual, lasso.iterations);
    println!("lasso KKT at 1e-6: {:?}", verify_lasso_kkt(&inst.phi, &inst.y_noisy, lambda, &lasso.x_star, 1e-6));

    let mut buf = Vec::new();
    write_instance_to(&mut buf, &InstanceData { phi: inst.phi.clone(), y: inst.y_noisy.clone(), x: Some(inst.x_true.clone()) })?;
    let back = read_instance_from(buf.as_slice())?;
    println!("instance file: {} bytes, round trip exact: {}", buf.len(), back.phi == inst.phi && back.y == inst.y_noisy);
    Ok(())
}
