//! Recovery-guarantee conditions evaluated on concrete sign-subset pairs,
//! their subset fractions, and end-to-end recovery experiments.
//!
//! Two condition sets are checked:
//!
//! * basis pursuit ([`check_theorem_b`]): invertibility `σmin(Φ_S) > a1`,
//!   small projections `max_{i∉S} |(Φ_S†φᵢ)ᵀβ| ≤ a2`, and worst-case
//!   projections `max_{i∉S} ‖Φ_S†φᵢ‖₁ ≤ a3`;
//! * LASSO ([`check_theorem_c`]): the same invertibility and small
//!   projections, invertibility projections `‖(Φ_SᵀΦ_S)⁻¹β‖∞ ≤ a3`, the two
//!   noise conditions, `(√2(1+a))⁻¹ + a2 < 1`, and the minimum-magnitude
//!   condition on the signal.
//!
//! Each [`Condition`] carries its margin, positive (or zero for the
//! non-strict inequalities) exactly when the condition holds.

mod experiment;
mod fractions;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::bounds::lasso_magnitude_threshold;
use crate::error::{Error, Result};
use crate::linalg::{gram_pseudoinverse, pseudoinverse, select_columns, svd_extremes, Tolerances};
use nalgebra::DMatrix;

pub use experiment::{
    noise_floor_overlay, run_recovery_experiment, sample_instance, Algorithm, EpsilonRule, ExperimentConfig,
    ExperimentResult, FloorPoint, SignalModel, TrialRecord,
};
pub use fractions::{estimate_fractions, FractionEstimate, FractionEstimates, FractionMode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub pass: bool,
    pub margin: f64,
}

impl Condition {
    /// `value ≤ bound`.
    fn at_most(value: f64, bound: f64) -> Self {
        let margin = bound - value;
        Self {
            pass: margin >= 0.0,
            margin,
        }
    }

    /// `value > bound`.
    fn above(value: f64, bound: f64) -> Self {
        let margin = value - bound;
        Self {
            pass: margin > 0.0,
            margin,
        }
    }
}

/// Constants `a1, a2, a3` of the condition sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub invertibility: Condition,
    pub small_projections: Condition,
    pub worst_case_projections: Condition,
    /// LASSO only.
    pub invertability_projections: Option<Condition>,
    pub noise_i: Option<bool>,
    pub noise_ii: Option<bool>,
    /// Minimum-magnitude condition; `None` when no magnitudes were given.
    pub magnitude_condition: Option<bool>,
    pub cand1: Option<bool>,
}

impl ConditionReport {
    /// All basis-pursuit conditions hold.
    pub fn theorem_b(&self) -> bool {
        self.invertibility.pass && self.small_projections.pass && self.worst_case_projections.pass
    }

    /// All LASSO conditions hold. Anything not evaluated counts as failing.
    pub fn theorem_c(&self) -> bool {
        self.invertibility.pass
            && self.small_projections.pass
            && self.invertability_projections.is_some_and(|c| c.pass)
            && self.noise_i == Some(true)
            && self.noise_ii == Some(true)
            && self.magnitude_condition == Some(true)
            && self.cand1 == Some(true)
    }
}

/// Cached quantities shared by both condition sets.
struct SupportGeometry {
    sigma_min: f64,
    phi_s: DMatrix<f64>,
    pinv: DMatrix<f64>,
    /// `Φ_S† Φ_{S_c}`, one column per off-support index.
    cross: DMatrix<f64>,
    complement: Vec<usize>,
}

fn validate_pair(n: usize, support: &[usize], beta: &[f64]) -> Result<()> {
    if support.is_empty() {
        return Err(Error::InvalidDimensions("support must be nonempty".into()));
    }
    if support.len() != beta.len() {
        return Err(Error::WidthMismatch {
            expected: support.len(),
            got: beta.len(),
        });
    }
    if let Some(&bad) = support.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != support.len() {
        return Err(Error::InvalidDimensions("support has repeated indices".into()));
    }
    if beta.iter().any(|&b| b != 1.0 && b != -1.0) {
        return Err(Error::OutOfRange("beta entries must be +1 or -1".into()));
    }
    Ok(())
}

impl SupportGeometry {
    fn new(phi: &DMatrix<f64>, support: &[usize], tol: &Tolerances) -> Result<Self> {
        let n = phi.ncols();
        let phi_s = select_columns(phi, support);
        let ext = svd_extremes(&phi_s, tol)?;
        let mut sigma_min = ext.sigma2_min.sqrt();
        if sigma_min <= tol.rank_tol * ext.sigma2_max.sqrt() {
            sigma_min = 0.0;
        }
        let pinv = pseudoinverse(&phi_s, tol)?;
        let mut on = vec![false; n];
        for &i in support {
            on[i] = true;
        }
        let complement: Vec<usize> = (0..n).filter(|&i| !on[i]).collect();
        let cross = &pinv * select_columns(phi, &complement);
        Ok(Self {
            sigma_min,
            phi_s,
            pinv,
            cross,
            complement,
        })
    }

    fn small_projection_max(&self, beta: &DVector<f64>) -> f64 {
        self.cross.tr_mul(beta).amax()
    }

    fn worst_projection_max(&self) -> f64 {
        self.cross
            .column_iter()
            .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Basis-pursuit conditions on `(β, S)`. Invertibility is `σmin > a1`, so
/// `a1 = 0` gives the plain full-rank requirement. `support` and `beta` are
/// aligned entry by entry.
pub fn check_theorem_b(
    phi: &DMatrix<f64>,
    support: &[usize],
    beta: &[f64],
    consts: &ConditionConstants,
    tol: &Tolerances,
) -> Result<ConditionReport> {
    validate_pair(phi.ncols(), support, beta)?;
    let geo = SupportGeometry::new(phi, support, tol)?;
    let b = DVector::from_column_slice(beta);
    Ok(ConditionReport {
        invertibility: Condition::above(geo.sigma_min, consts.a1),
        small_projections: Condition::at_most(geo.small_projection_max(&b), consts.a2),
        worst_case_projections: Condition::at_most(geo.worst_projection_max(), consts.a3),
        invertability_projections: None,
        noise_i: None,
        noise_ii: None,
        magnitude_condition: None,
        cand1: None,
    })
}

/// Noise and regularization inputs of the LASSO condition set.
#[derive(Debug, Clone, Copy)]
pub struct LassoInputs<'a> {
    pub z: &'a DVector<f64>,
    pub sigma_z: f64,
    /// The `a` in `θ_n = (1 + a)√(2 ln n)`.
    pub a: f64,
    /// Signal values on the support, aligned with `support`.
    pub magnitudes: Option<&'a [f64]>,
}

/// `(√2(1 + a))⁻¹ + a2 < 1`.
pub fn cand1(a: f64, a2: f64) -> bool {
    1.0 / (2.0f64.sqrt() * (1.0 + a)) + a2 < 1.0
}

/// LASSO conditions on `(β, S)` with the realized noise `z`.
pub fn check_theorem_c(
    phi: &DMatrix<f64>,
    support: &[usize],
    beta: &[f64],
    inputs: &LassoInputs<'_>,
    consts: &ConditionConstants,
    tol: &Tolerances,
) -> Result<ConditionReport> {
    let (m, n) = phi.shape();
    validate_pair(n, support, beta)?;
    if !(inputs.sigma_z > 0.0) {
        return Err(Error::OutOfRange("noise conditions need sigma_z > 0".into()));
    }
    if inputs.z.len() != m {
        return Err(Error::InvalidDimensions(format!("z has length {}, expected {m}", inputs.z.len())));
    }
    let geo = SupportGeometry::new(phi, support, tol)?;
    let b = DVector::from_column_slice(beta);
    let inv_proj = (gram_pseudoinverse(&geo.phi_s, tol)? * &b).amax();

    let log_n = (n as f64).ln();
    let pz = &geo.pinv * inputs.z;
    let noise_i = pz.amax() <= inputs.sigma_z * (2.0 * log_n).sqrt() / consts.a1;
    let resid = inputs.z - &geo.phi_s * &pz;
    let off = select_columns(phi, &geo.complement).tr_mul(&resid);
    let noise_ii = off.amax() <= inputs.sigma_z * 2.0 * log_n.sqrt();

    let magnitude_condition = match inputs.magnitudes {
        Some(vals) => {
            if vals.len() != support.len() {
                return Err(Error::WidthMismatch {
                    expected: support.len(),
                    got: vals.len(),
                });
            }
            let t = lasso_magnitude_threshold(consts.a1, consts.a3, inputs.a, n, inputs.sigma_z)?;
            Some(vals.iter().all(|v| v.abs() >= t))
        }
        None => None,
    };

    Ok(ConditionReport {
        invertibility: Condition::above(geo.sigma_min, consts.a1),
        small_projections: Condition::at_most(geo.small_projection_max(&b), consts.a2),
        worst_case_projections: Condition::at_most(geo.worst_projection_max(), consts.a3),
        invertability_projections: Some(Condition::at_most(inv_proj, consts.a3)),
        noise_i: Some(noise_i),
        noise_ii: Some(noise_ii),
        magnitude_condition,
        cand1: Some(cand1(inputs.a, consts.a2)),
    })
}
