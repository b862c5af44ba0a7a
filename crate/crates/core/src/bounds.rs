//! Closed-form tail bounds, measurement-rate formulas and the LASSO noise
//! floor.
//!
//! Probability-valued bounds return a [`Bound`], clamped to `[0, 1]` with a
//! `vacuous` flag whenever clamping was needed. Logarithms are natural.

use serde::{Deserialize, Serialize};

use crate::ensembles::Law;
use crate::error::{Error, Result};

/// Constants of the extreme-singular-value tail bounds
/// `Pr{σmin < c·0.29 − t}, Pr{σmax > 1.71 + t} ≤ exp(−m t²/c₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailConstants {
    pub c1: f64,
    pub smin_center: f64,
    pub smax_center: f64,
    /// Multiplier on `smin_center`; 1 unless reinstated explicitly.
    pub c: f64,
}

impl TailConstants {
    pub fn with_c1(c1: f64) -> Self {
        Self {
            c1,
            smin_center: 0.29,
            smax_center: 1.71,
            c: 1.0,
        }
    }

    /// Gaussian `c₁ = 2`, Bernoulli `c₁ = 16`; Uniform uses the bounded-entry
    /// value 16.
    pub fn for_law(law: Law) -> Self {
        match law {
            Law::Gaussian => Self::with_c1(2.0),
            Law::Bernoulli | Law::Uniform => Self::with_c1(16.0),
        }
    }

    fn smin_edge(&self) -> f64 {
        self.c * self.smin_center
    }

    fn validate(&self) -> Result<()> {
        if self.c1 > 0.0 && self.c > 0.0 {
            Ok(())
        } else {
            Err(Error::OutOfRange("c1 and c must be positive".into()))
        }
    }
}

impl Default for TailConstants {
    fn default() -> Self {
        Self::for_law(Law::Gaussian)
    }
}

/// A probability bound after clamping to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub raw: f64,
    pub vacuous: bool,
}

impl Bound {
    fn clamp(raw: f64) -> Self {
        Self {
            value: raw.clamp(0.0, 1.0),
            raw,
            vacuous: raw > 1.0,
        }
    }
}

/// `Pr{|Σ cᵢXᵢ| > m t} ≤ 2 exp(−(m t)² / (2 ‖c‖²))` for independent
/// 1-sub-Gaussian `Xᵢ`.
pub fn hoeffding_sum_tail(c_norm_sq: f64, m: usize, t: f64) -> Result<Bound> {
    if !(t > 0.0) {
        return Err(Error::OutOfRange(format!("t must be positive, got {t}")));
    }
    if !(c_norm_sq > 0.0) {
        return Err(Error::OutOfRange("‖c‖² must be positive".into()));
    }
    let mt = m as f64 * t;
    Ok(Bound::clamp(2.0 * (-(mt * mt) / (2.0 * c_norm_sq)).exp()))
}

/// `Pr{σmin(A_S) ≤ a1} ≤ exp(−m (0.29 − a1)² / c₁)`, valid for `m ≥ 2k`.
pub fn smin_tail_bound(m: usize, a1: f64, tc: &TailConstants) -> Result<Bound> {
    tc.validate()?;
    let edge = tc.smin_edge();
    if !(a1 > 0.0 && a1 < edge) {
        return Err(Error::OutOfRange(format!("a1={a1} must lie in (0, {edge})")));
    }
    let t = edge - a1;
    Ok(Bound::clamp((-(m as f64) * t * t / tc.c1).exp()))
}

/// `Pr{σmax(A_S) > aM} ≤ exp(−m (aM − 1.71)² / c₁)`.
pub fn smax_tail_bound(m: usize, a_max: f64, tc: &TailConstants) -> Result<Bound> {
    tc.validate()?;
    if !(a_max > tc.smax_center) {
        return Err(Error::OutOfRange(format!(
            "aM={a_max} must exceed {}",
            tc.smax_center
        )));
    }
    let t = a_max - tc.smax_center;
    Ok(Bound::clamp((-(m as f64) * t * t / tc.c1).exp()))
}

/// `Pr{|(A_S†A_ω)ᵀβ| > a} ≤ 2 exp(−m a² δ / (2k)) + Pr{σ²min(A_S) ≤ δ}`,
/// with the second term bounded through [`smin_tail_bound`] at `a1 = √δ`.
pub fn proj_tail_bound(m: usize, k: usize, a: f64, delta: f64, tc: &TailConstants) -> Result<Bound> {
    tc.validate()?;
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    if !(a > 0.0) {
        return Err(Error::OutOfRange(format!("a={a} must be positive")));
    }
    let edge = tc.smin_edge();
    if !(delta > 0.0 && delta < edge * edge) {
        return Err(Error::OutOfRange(format!("delta={delta} must lie in (0, {})", edge * edge)));
    }
    let first = 2.0 * (-(m as f64) * a * a * delta / (2.0 * k as f64)).exp();
    let second = smin_tail_bound(m, delta.sqrt(), tc)?.raw;
    Ok(Bound::clamp(first + second))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateVariant {
    /// `const·k·ln((n−k)/u)`
    Simple,
    /// `const·k·[ln((n−k)/u) + √(2 (k/n) ln(n/k))]`
    Full,
}

impl RateVariant {
    pub fn name(&self) -> &'static str {
        match self {
            RateVariant::Simple => "simple",
            RateVariant::Full => "full",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateQuery {
    pub k: usize,
    pub n: usize,
    pub u: f64,
    pub constant: f64,
    pub variant: RateVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub m_real: f64,
    pub m_rounded: i64,
    /// Set when `ln((n−k)/u) ≤ 0`, i.e. the requested fraction is trivial.
    pub degenerate: bool,
}

/// Number of measurements sufficient for a per-condition failure fraction `u`.
pub fn rate(q: &RateQuery) -> Result<RateResult> {
    if q.k == 0 || q.n <= q.k {
        return Err(Error::OutOfRange(format!("need n > k >= 1 (n={}, k={})", q.n, q.k)));
    }
    if !(q.u > 0.0 && q.u <= 1.0) {
        return Err(Error::OutOfRange(format!("u={} must lie in (0, 1]", q.u)));
    }
    if !(q.constant > 0.0) {
        return Err(Error::OutOfRange("rate constant must be positive".into()));
    }
    let k = q.k as f64;
    let n = q.n as f64;
    let log_term = ((n - k) / q.u).ln();
    let bracket = match q.variant {
        RateVariant::Simple => log_term,
        RateVariant::Full => log_term + (2.0 * (k / n) * (n / k).ln()).sqrt(),
    };
    let m_real = q.constant * k * bracket;
    Ok(RateResult {
        m_real,
        m_rounded: m_real.round() as i64,
        degenerate: log_term <= 0.0,
    })
}

/// `max(4/(a1 a2)², 2c₁/(0.29 − a1)²)`; always at least 4 on its domain.
pub fn rate_constant(a1: f64, a2: f64, tc: &TailConstants) -> Result<f64> {
    tc.validate()?;
    let edge = tc.smin_edge();
    if !(a1 > 0.0 && a1 < edge) {
        return Err(Error::OutOfRange(format!("a1={a1} must lie in (0, {edge})")));
    }
    if !(a2 > 0.0 && a2 < 1.0) {
        return Err(Error::OutOfRange(format!("a2={a2} must lie in (0, 1)")));
    }
    let c = (4.0 / (a1 * a2).powi(2)).max(2.0 * tc.c1 / (edge - a1).powi(2));
    debug_assert!(c >= 4.0);
    Ok(c)
}

/// `τ_k = (aM/am)² (1 + k^{-1/2}) / (1 − k^{-1/2})`.
pub fn tau_k(a_max: f64, a_min: f64, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("tau_k needs k >= 2, got {k}")));
    }
    if !(a_min > 0.0) {
        return Err(Error::OutOfRange("am must be positive".into()));
    }
    let r = 1.0 / (k as f64).sqrt();
    Ok((a_max / a_min).powi(2) * (1.0 + r) / (1.0 - r))
}

/// Threshold `(√k + 1)|τ_k − 1| / (am² (τ_k + 1))` that `‖(A_SᵀA_S)†β‖∞`
/// cannot exceed while `am ≤ σmin(A_S) ≤ σmax(A_S) ≤ aM`.
pub fn wielandt_bound(k: usize, a_min: f64, a_max: f64) -> Result<f64> {
    if !(a_min > 0.0 && a_min <= a_max) {
        return Err(Error::OutOfRange(format!("need 0 < am <= aM (am={a_min}, aM={a_max})")));
    }
    let tau = tau_k(a_max, a_min, k)?;
    Ok(((k as f64).sqrt() + 1.0) * (tau - 1.0).abs() / (a_min * a_min * (tau + 1.0)))
}

/// The invertability-projections constant used for LASSO:
/// [`wielandt_bound`] at `am = a1`, `aM = 1.42 − a1`.
pub fn a3_lasso(a1: f64, k: usize) -> Result<f64> {
    if !(a1 > 0.0 && a1 <= 0.29) {
        return Err(Error::OutOfRange(format!("a1={a1} must lie in (0, 0.29]")));
    }
    wielandt_bound(k, a1, 1.42 - a1)
}

/// `a·√k`, the worst-case-projection constant paired with a small-projection
/// (or invertibility) constant `a`.
pub fn a3_worst_case(a: f64, k: usize) -> f64 {
    a * (k as f64).sqrt()
}

/// Lower bound `1 − 1/(n √(2π ln n))` on the probability that both noise
/// conditions hold.
pub fn noise_condition_prob(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("n={n} must be at least 2")));
    }
    let nf = n as f64;
    Ok(1.0 - 1.0 / (nf * (2.0 * std::f64::consts::PI * nf.ln()).sqrt()))
}

/// LASSO regularization `λ = 2 σ_Z (1 + a) √(2 ln n)` for the objective
/// `½‖y − Φx‖² + λ‖x‖₁`.
pub fn lasso_lambda(sigma_z: f64, a: f64, n: usize) -> f64 {
    2.0 * sigma_z * (1.0 + a) * (2.0 * (n as f64).ln()).sqrt()
}

/// Smallest nonzero magnitude `[1/a1 + 2 a3 (1+a)] σ_Z √(2 ln n)` the LASSO
/// sign-recovery guarantee asks for.
pub fn lasso_magnitude_threshold(a1: f64, a3: f64, a: f64, n: usize, sigma_z: f64) -> Result<f64> {
    if !(a1 > 0.0) {
        return Err(Error::OutOfRange("a1 must be positive".into()));
    }
    if n < 2 {
        return Err(Error::OutOfRange(format!("n={n} must be at least 2")));
    }
    if !(a >= 0.0 && a3 >= 0.0 && sigma_z >= 0.0) {
        return Err(Error::OutOfRange("a, a3 and sigma_z must be nonnegative".into()));
    }
    Ok((1.0 / a1 + 2.0 * a3 * (1.0 + a)) * sigma_z * (2.0 * (n as f64).ln()).sqrt())
}

/// Probability `1 − (1 − t)^k` that the smallest of `k` magnitudes drawn
/// uniformly from `[0, 1]` falls below `t`.
pub fn noise_floor(k: usize, t: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    let t = t.clamp(0.0, 1.0);
    Ok(1.0 - (1.0 - t).powi(k as i32))
}
