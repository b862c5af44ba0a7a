use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use serde::{Deserialize, Serialize};

use super::{cell, num, csv_writer, finish_csv, list_f64, list_usize, merge_fields, required, to_json, CliError, CliResult, Output, Values};
use crate::bounds::{lasso_lambda, lasso_magnitude_threshold, noise_floor};
use crate::conditions::{run_recovery_experiment, Algorithm, EpsilonRule, ExperimentConfig, ExperimentResult, SignalModel};
use crate::ensembles::{EnsembleSpec, Law, Normalization};
use crate::rng::SeedSpec;
use crate::solvers::{read_instance, solve_bp, solve_lasso, SolverTolerances};

/// `noise` (radius `‖z‖₂` per trial) or a fixed radius.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum EpsilonArg {
    Fixed(f64),
    Named(NoiseNorm),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseNorm {
    Noise,
}

impl FromStr for EpsilonArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("noise") {
            return Ok(EpsilonArg::Named(NoiseNorm::Noise));
        }
        s.parse().map(EpsilonArg::Fixed).map_err(|_| format!("'{s}' is neither 'noise' nor a number"))
    }
}

impl From<EpsilonArg> for EpsilonRule {
    fn from(e: EpsilonArg) -> Self {
        match e {
            EpsilonArg::Fixed(v) => EpsilonRule::Fixed(v),
            EpsilonArg::Named(NoiseNorm::Noise) => EpsilonRule::NoiseNorm,
        }
    }
}

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverArgs {
    /// [default: gaussian]
    #[arg(long)]
    pub law: Option<Law>,
    #[arg(long)]
    pub normalization: Option<Normalization>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Block lengths, e.g. `200:500:100`.
    #[arg(long)]
    pub n: Option<Values>,
    /// Sparsity levels, e.g. `1:6:1`.
    #[arg(long)]
    pub k: Option<Values>,
    /// Trials per cell [default: 1000].
    #[arg(long)]
    pub trials: Option<u64>,
    /// plus_minus_one or uniform_magnitude [default: plus_minus_one].
    #[arg(long)]
    pub signal: Option<SignalModel>,
    /// Noise standard deviations [default: 0].
    #[arg(long)]
    pub sigma: Option<Values>,
    /// bp or lasso [default: bp].
    #[arg(long)]
    pub algorithm: Option<Algorithm>,
    /// The `a` in the LASSO regularizer `2σ(1+a)√(2 ln n)` [default: 1].
    #[arg(long)]
    pub a: Option<f64>,
    /// BP radius: `noise` for `‖z‖₂`, or a number [default: noise].
    #[arg(long)]
    pub epsilon: Option<EpsilonArg>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Magnitude below which a recovered entry counts as zero [default: 1e-6].
    #[arg(long)]
    pub zero_tol: Option<f64>,
    /// `a1` of the noise conditions [default: 0.29].
    #[arg(long)]
    pub noise_a1: Option<f64>,
    /// `a3` used for the predicted noise floor column [default: 1].
    #[arg(long)]
    pub floor_a3: Option<f64>,
    /// Relative KKT tolerance of the solvers [default: 1e-8].
    #[arg(long)]
    pub kkt_tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Omit per-trial rows.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub summary_only: Option<bool>,
    /// Solve one imported instance (CSV layout of `solvers::write_instance`)
    /// instead of running trials.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// LASSO regularizer for --instance (otherwise from --sigma and --a).
    #[arg(long)]
    pub lambda: Option<f64>,
}

impl RecoverArgs {
    pub(crate) fn merged(mut self, file: Option<Self>) -> Self {
        if let Some(f) = file {
            merge_fields!(self, f; law, normalization, m, n, k, trials, signal, sigma, algorithm, a, epsilon,
                seed, zero_tol, noise_a1, floor_a3, kkt_tol, max_iter, summary_only, instance, lambda);
        }
        self
    }
}

#[derive(Debug, Clone, Serialize)]
struct RecoverConfig {
    base: ExperimentConfig,
    n: Vec<usize>,
    k: Vec<usize>,
    sigma: Vec<f64>,
    floor_a3: f64,
    summary_only: bool,
}

fn solver_tolerances(a: &RecoverArgs) -> SolverTolerances {
    let d = SolverTolerances::default();
    SolverTolerances {
        kkt_tol: a.kkt_tol.unwrap_or(d.kkt_tol),
        max_iter: a.max_iter.unwrap_or(d.max_iter),
        ..d
    }
}

fn resolve(a: RecoverArgs) -> CliResult<RecoverConfig> {
    let m = required(a.m, "m", "recover")?;
    let n = list_usize(&required(a.n.clone(), "n", "recover")?, "n")?;
    let k = list_usize(&required(a.k.clone(), "k", "recover")?, "k")?;
    let sigma = match &a.sigma {
        Some(s) => list_f64(s, "sigma")?,
        None => vec![0.0],
    };
    let ensemble = EnsembleSpec::new(a.law.unwrap_or(Law::Gaussian), m, n[0]).with_normalization(a.normalization.unwrap_or_default());
    let mut base = ExperimentConfig::new(
        ensemble,
        k[0],
        a.trials.unwrap_or(1000),
        a.algorithm.unwrap_or(Algorithm::Bp),
        SeedSpec::new(a.seed.unwrap_or(0)),
    );
    base.signal_model = a.signal.unwrap_or(SignalModel::PlusMinusOne);
    base.sigma_z = sigma[0];
    base.lasso_a = a.a.unwrap_or(base.lasso_a);
    base.zero_tol = a.zero_tol.unwrap_or(base.zero_tol);
    base.noise_a1 = a.noise_a1.unwrap_or(base.noise_a1);
    base.bp_epsilon = a.epsilon.map(Into::into).unwrap_or(base.bp_epsilon);
    base.solver = solver_tolerances(&a);
    Ok(RecoverConfig {
        base,
        n,
        k,
        sigma,
        floor_a3: a.floor_a3.unwrap_or(1.0),
        summary_only: a.summary_only.unwrap_or(false),
    })
}

const HEADER: [&str; 25] = [
    "row", "law", "m", "n", "k", "sigma_z", "algorithm", "signal", "trial", "recovered", "converged", "iterations",
    "kkt_residual", "min_abs_signal", "noise_i", "noise_ii", "trials", "failures", "failure_fraction", "ci",
    "solver_failures", "conditioned_trials", "conditioned_failures", "conditioned_failure_fraction", "floor",
];

fn flag(b: Option<bool>) -> String {
    b.map(|v| (v as u8).to_string()).unwrap_or_default()
}

fn write_cell(w: &mut csv::Writer<Vec<u8>>, r: &ExperimentResult, floor: Option<f64>, trial_rows: bool) -> CliResult<()> {
    let c = &r.config;
    let lead = |row: &str| -> Vec<String> {
        vec![
            row.to_string(),
            c.ensemble.law.name().to_string(),
            c.ensemble.m.to_string(),
            c.ensemble.n.to_string(),
            c.k.to_string(),
            num(c.sigma_z),
            c.algorithm.to_string(),
            c.signal_model.name().to_string(),
        ]
    };
    if trial_rows {
        for t in &r.records {
            let mut rec = lead("trial");
            rec.extend([
                t.trial.to_string(),
                flag(Some(t.recovered)),
                flag(Some(t.converged)),
                t.iterations.to_string(),
                cell(Some(t.kkt_residual)),
                num(t.min_abs_signal),
                flag(t.noise_i),
                flag(t.noise_ii),
            ]);
            rec.extend(std::iter::repeat_n(String::new(), 9));
            w.write_record(&rec)?;
        }
    }
    let mut rec = lead("summary");
    rec.extend(std::iter::repeat_n(String::new(), 8));
    rec.extend([
        r.trials.to_string(),
        r.failures.to_string(),
        num(r.failure_fraction),
        num(r.ci_halfwidth),
        r.solver_failures.to_string(),
        r.conditioned_trials.to_string(),
        r.conditioned_failures.to_string(),
        cell(Some(r.conditioned_failure_fraction)),
        cell(floor),
    ]);
    w.write_record(&rec)?;
    Ok(())
}

/// Cell seeds depend on the cell's parameters, not its position in the
/// sweep, so any sub-sweep reproduces the same rows.
fn cell_seed(root: SeedSpec, n: usize, k: usize, sigma: f64) -> SeedSpec {
    root.child(n as u64).child(k as u64).child(sigma.to_bits())
}

fn run_sweep(c: &RecoverConfig) -> CliResult<Output> {
    let mut w = csv_writer();
    w.write_record(HEADER)?;
    let mut partial = false;
    for &n in &c.n {
        for &k in &c.k {
            for &sigma in &c.sigma {
                let mut cfg = c.base.clone();
                cfg.ensemble.n = n;
                cfg.k = k;
                cfg.sigma_z = sigma;
                cfg.seed = cell_seed(c.base.seed, n, k, sigma);
                let r = run_recovery_experiment(&cfg)?;
                partial |= r.solver_failures > 0;
                let floor = (cfg.algorithm == Algorithm::Lasso && cfg.signal_model == SignalModel::UniformMagnitude)
                    .then(|| -> crate::Result<f64> {
                        let t = lasso_magnitude_threshold(cfg.noise_a1, c.floor_a3, cfg.lasso_a, n, sigma)?;
                        noise_floor(k, t)
                    })
                    .transpose()?;
                write_cell(&mut w, &r, floor, !c.summary_only)?;
            }
        }
    }
    Ok(Output {
        csv: finish_csv(w)?,
        config: to_json(c),
        seed: Some(c.base.seed),
        partial,
    })
}

#[derive(Debug, Clone, Serialize)]
struct InstanceConfig {
    instance: PathBuf,
    algorithm: Algorithm,
    epsilon: Option<f64>,
    lambda: Option<f64>,
    solver: SolverTolerances,
}

fn run_instance(a: RecoverArgs, path: PathBuf) -> CliResult<Output> {
    let data = read_instance(&path)?;
    let algorithm = a.algorithm.unwrap_or(Algorithm::Bp);
    let solver = solver_tolerances(&a);
    let (rep, cfg) = match algorithm {
        Algorithm::Bp => {
            let eps = match a.epsilon {
                None => 0.0,
                Some(EpsilonArg::Fixed(e)) => e,
                Some(EpsilonArg::Named(_)) => return Err(CliError::config("an imported instance has no noise vector; give a numeric epsilon")),
            };
            let rep = solve_bp(&data.phi, &data.y, eps, &solver)?;
            (rep, InstanceConfig { instance: path, algorithm, epsilon: Some(eps), lambda: None, solver })
        }
        Algorithm::Lasso => {
            let lambda = match (a.lambda, a.sigma.as_ref()) {
                (Some(l), _) => l,
                (None, Some(s)) => lasso_lambda(list_f64(s, "sigma")?[0], a.a.unwrap_or(1.0), data.phi.ncols()),
                (None, None) => return Err(CliError::config("LASSO on an instance needs --lambda or --sigma")),
            };
            let rep = solve_lasso(&data.phi, &data.y, lambda, &solver)?;
            (rep, InstanceConfig { instance: path, algorithm, epsilon: None, lambda: Some(lambda), solver })
        }
    };
    let mut w = csv_writer();
    w.write_record(["j", "x_star", "x_true"])?;
    for j in 0..rep.x_star.len() {
        let truth = data.x.as_ref().map(|x| x[j]);
        w.write_record([j.to_string(), num(rep.x_star[j]), cell(truth)])?;
    }
    eprintln!(
        "objective {:.6e}, kkt residual {:.2e}, {} iterations, converged: {}",
        rep.objective, rep.kkt_residual, rep.iterations, rep.converged
    );
    Ok(Output {
        csv: finish_csv(w)?,
        config: to_json(&cfg),
        seed: None,
        partial: !rep.converged,
    })
}

pub(super) fn run(args: RecoverArgs) -> CliResult<Output> {
    if let Some(path) = args.instance.clone() {
        return run_instance(args, path);
    }
    run_sweep(&resolve(args)?)
}
