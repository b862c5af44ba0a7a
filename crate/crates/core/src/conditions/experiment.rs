use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{lasso_lambda, lasso_magnitude_threshold, noise_floor};
use crate::ensembles::{sample_matrix, EnsembleSpec};
use crate::error::{Error, Result};
use crate::linalg::{pseudoinverse, select_columns, Tolerances};
use crate::rng::SeedSpec;
use crate::solvers::{pattern_match, solve_bp, solve_lasso, RecoveryInstance, SolverTolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalModel {
    /// Nonzeros equal to `±1`.
    PlusMinusOne,
    /// Nonzeros with magnitudes uniform on `(0, 1]`.
    UniformMagnitude,
}

impl SignalModel {
    pub fn name(&self) -> &'static str {
        match self {
            SignalModel::PlusMinusOne => "plus_minus_one",
            SignalModel::UniformMagnitude => "uniform_magnitude",
        }
    }
}

impl FromStr for SignalModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "plus_minus_one" | "pm1" | "signs" => Ok(SignalModel::PlusMinusOne),
            "uniform_magnitude" | "uniform" => Ok(SignalModel::UniformMagnitude),
            other => Err(Error::Parse(format!("unknown signal model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Bp,
    Lasso,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Bp => "bp",
            Algorithm::Lasso => "lasso",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bp" | "l1" | "basis_pursuit" => Ok(Algorithm::Bp),
            "lasso" => Ok(Algorithm::Lasso),
            other => Err(Error::Parse(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// How the basis-pursuit radius `ε` is chosen per trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonRule {
    /// `ε = ‖z‖₂`, the smallest radius keeping the true signal feasible.
    NoiseNorm,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleSpec,
    pub k: usize,
    pub trials: u64,
    pub signal_model: SignalModel,
    pub sigma_z: f64,
    pub algorithm: Algorithm,
    /// The `a` in `λ = 2σ_Z(1 + a)√(2 ln n)`.
    pub lasso_a: f64,
    pub seed: SeedSpec,
    pub zero_tol: f64,
    pub bp_epsilon: EpsilonRule,
    /// `a1` used by noise condition i) when reporting conditioned rates.
    pub noise_a1: f64,
    pub solver: SolverTolerances,
}

impl ExperimentConfig {
    pub fn new(ensemble: EnsembleSpec, k: usize, trials: u64, algorithm: Algorithm, seed: SeedSpec) -> Self {
        Self {
            ensemble,
            k,
            trials,
            signal_model: SignalModel::PlusMinusOne,
            sigma_z: 0.0,
            algorithm,
            lasso_a: 1.0,
            seed,
            zero_tol: 1e-6,
            bp_epsilon: EpsilonRule::NoiseNorm,
            noise_a1: 0.29,
            solver: SolverTolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let EnsembleSpec { m, n, .. } = self.ensemble;
        if self.trials == 0 {
            return Err(Error::OutOfRange("trials must be at least 1".into()));
        }
        if !(self.k >= 1 && self.k < m && m < n) {
            return Err(Error::OutOfRange(format!("need 1 <= k < m < n (k={}, m={m}, n={n})", self.k)));
        }
        if !(self.sigma_z >= 0.0) {
            return Err(Error::OutOfRange("sigma_z must be nonnegative".into()));
        }
        if self.algorithm == Algorithm::Lasso && self.sigma_z == 0.0 {
            return Err(Error::OutOfRange("LASSO needs sigma_z > 0 (the regularizer is proportional to it)".into()));
        }
        if !(self.lasso_a >= 0.0 && self.zero_tol > 0.0 && self.noise_a1 > 0.0) {
            return Err(Error::OutOfRange("lasso_a must be nonnegative; zero_tol and noise_a1 positive".into()));
        }
        if let EpsilonRule::Fixed(e) = self.bp_epsilon {
            if !(e >= 0.0) {
                return Err(Error::OutOfRange("fixed epsilon must be nonnegative".into()));
            }
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        lasso_lambda(self.sigma_z, self.lasso_a, self.ensemble.n)
    }
}

/// Draws the instance for trial `t`: matrix, uniform support and signs,
/// signal per the model, and Gaussian noise of standard deviation `sigma_z`.
pub fn sample_instance(config: &ExperimentConfig, t: u64) -> Result<RecoveryInstance> {
    let EnsembleSpec { m, n, .. } = config.ensemble;
    let seed = config.seed.child(t);
    let phi = sample_matrix(&config.ensemble, seed.child(0))?;
    let mut rng = seed.child(1).rng();
    let mut support = sample_indices(&mut rng, n, config.k).into_vec();
    support.sort_unstable();
    let mut x = DVector::zeros(n);
    for &j in &support {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let mag = match config.signal_model {
            SignalModel::PlusMinusOne => 1.0,
            // 1 − U with U on [0, 1) lands on (0, 1]
            SignalModel::UniformMagnitude => 1.0 - rng.random::<f64>(),
        };
        x[j] = sign * mag;
    }
    let mut noise_rng = seed.child(2).rng();
    let z = if config.sigma_z > 0.0 {
        DVector::from_fn(m, |_, _| config.sigma_z * noise_rng.sample::<f64, _>(StandardNormal))
    } else {
        DVector::zeros(m)
    };
    RecoveryInstance::new(phi, x, support, z, config.sigma_z)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub recovered: bool,
    pub converged: bool,
    /// Solver error message, if the solve aborted.
    pub solver_error: Option<String>,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub min_abs_signal: f64,
    /// Noise conditions; `None` without noise.
    pub noise_i: Option<bool>,
    pub noise_ii: Option<bool>,
}

impl TrialRecord {
    pub fn solver_failed(&self) -> bool {
        !self.converged
    }

    pub fn noise_ok(&self) -> bool {
        self.noise_i != Some(false) && self.noise_ii != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub trials: u64,
    /// Pattern-recovery failures, solver failures included.
    pub failures: u64,
    pub failure_fraction: f64,
    pub ci_halfwidth: f64,
    pub solver_failures: u64,
    /// Trials on which both noise conditions held.
    pub conditioned_trials: u64,
    pub conditioned_failures: u64,
    pub conditioned_failure_fraction: f64,
    pub records: Vec<TrialRecord>,
}

fn noise_checks(inst: &RecoveryInstance, a1: f64, tol: &Tolerances) -> Result<(bool, bool)> {
    let n = inst.phi.ncols();
    let phi_s = select_columns(&inst.phi, &inst.support);
    let pz = pseudoinverse(&phi_s, tol)? * &inst.z;
    let log_n = (n as f64).ln();
    let i_ok = pz.amax() <= inst.sigma_z * (2.0 * log_n).sqrt() / a1;
    let resid = &inst.z - &phi_s * &pz;
    let c = inst.phi.tr_mul(&resid);
    let mut on = vec![false; n];
    for &j in &inst.support {
        on[j] = true;
    }
    let worst = (0..n).filter(|&j| !on[j]).map(|j| c[j].abs()).fold(0.0, f64::max);
    Ok((i_ok, worst <= inst.sigma_z * 2.0 * log_n.sqrt()))
}

fn run_trial(config: &ExperimentConfig, t: u64) -> Result<TrialRecord> {
    let inst = sample_instance(config, t)?;
    let solved = match config.algorithm {
        Algorithm::Bp => {
            let eps = match config.bp_epsilon {
                EpsilonRule::NoiseNorm => inst.z.norm(),
                EpsilonRule::Fixed(e) => e,
            };
            solve_bp(&inst.phi, &inst.y_noisy, eps, &config.solver)
        }
        Algorithm::Lasso => solve_lasso(&inst.phi, &inst.y_noisy, config.lambda(), &config.solver),
    };
    let (noise_i, noise_ii) = if config.sigma_z > 0.0 {
        let (a, b) = noise_checks(&inst, config.noise_a1, &Tolerances::default())?;
        (Some(a), Some(b))
    } else {
        (None, None)
    };
    let min_abs_signal = inst.support.iter().map(|&j| inst.x_true[j].abs()).fold(f64::INFINITY, f64::min);
    let mut rec = TrialRecord {
        trial: t,
        recovered: false,
        converged: false,
        solver_error: None,
        iterations: 0,
        kkt_residual: f64::NAN,
        min_abs_signal,
        noise_i,
        noise_ii,
    };
    match solved {
        Ok(rep) => {
            rec.converged = rep.converged;
            rec.iterations = rep.iterations;
            rec.kkt_residual = rep.kkt_residual;
            rec.recovered = rep.converged && pattern_match(&rep.x_star, &inst.support, &inst.beta, config.zero_tol);
        }
        Err(e) => rec.solver_error = Some(e.to_string()),
    }
    Ok(rec)
}

/// Runs `config.trials` independent recovery trials. Trials run in
/// parallel on per-trial substreams; solver problems are recorded per trial
/// and never abort the sweep.
pub fn run_recovery_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let records: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect::<Result<_>>()?;
    let failures = records.iter().filter(|r| !r.recovered).count() as u64;
    let solver_failures = records.iter().filter(|r| r.solver_failed()).count() as u64;
    let cond: Vec<&TrialRecord> = records.iter().filter(|r| r.noise_ok()).collect();
    let conditioned_failures = cond.iter().filter(|r| !r.recovered).count() as u64;
    let trials = config.trials;
    let p = failures as f64 / trials as f64;
    Ok(ExperimentResult {
        config: config.clone(),
        trials,
        failures,
        failure_fraction: p,
        ci_halfwidth: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
        solver_failures,
        conditioned_trials: cond.len() as u64,
        conditioned_failures,
        conditioned_failure_fraction: if cond.is_empty() {
            f64::NAN
        } else {
            conditioned_failures as f64 / cond.len() as f64
        },
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloorPoint {
    pub sigma_z: f64,
    pub threshold: f64,
    pub floor: f64,
}

/// Predicted LASSO failure floor `1 − (1 − t)^k` for each noise level,
/// where `t` is the minimum-magnitude threshold at that level.
pub fn noise_floor_overlay(config: &ExperimentConfig, a1: f64, a3: f64, sigmas: &[f64]) -> Result<Vec<FloorPoint>> {
    if config.signal_model != SignalModel::UniformMagnitude {
        return Err(Error::OutOfRange("the noise floor assumes uniform magnitudes".into()));
    }
    sigmas
        .iter()
        .map(|&s| {
            let t = lasso_magnitude_threshold(a1, a3, config.lasso_a, config.ensemble.n, s)?;
            Ok(FloorPoint {
                sigma_z: s,
                threshold: t,
                floor: noise_floor(config.k, t)?,
            })
        })
        .collect()
}
