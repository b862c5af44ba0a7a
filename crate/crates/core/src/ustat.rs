//! U-statistics of a sampled sensing matrix and their large-deviation
//! envelope.
//!
//! For a bounded kernel `g` of width `w`, the U-statistic of `Φ` is the
//! average of `g(Φ_S, a)` over all `C(n, w)` column subsets `S`. Its mean
//! `p(a) = E g(A_S, a)` does not depend on `n`, so it can be estimated from
//! fresh `m x w` draws ([`marginal_mean_mc`]).
//!
//! All parallel reductions run over fixed-size chunks whose partial sums are
//! combined in chunk order, so results do not depend on the thread count.

use nalgebra::DMatrix;
use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, next_combination, unrank_combination};
use crate::ensembles::{sample_submatrix_columns, EnsembleSpec};
use crate::error::{Error, Result};
use crate::kernels::BoundedKernel;
use crate::linalg::select_columns;
use crate::rng::SeedSpec;

/// Default limit on the number of subsets an exhaustive sweep may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 2_000_000;

const CHUNK: usize = 512;
const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateMode {
    Exhaustive,
    MonteCarlo,
}

impl EstimateMode {
    pub fn name(&self) -> &'static str {
        match self {
            EstimateMode::Exhaustive => "exhaustive",
            EstimateMode::MonteCarlo => "montecarlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UStatResult {
    /// `U_n(a)`, or `p̂(a)` for marginal estimates.
    pub value: f64,
    pub mode: EstimateMode,
    /// Number of kernel evaluations averaged.
    pub trials: u64,
    /// 95% normal-approximation half width; zero for exhaustive results.
    pub ci_halfwidth: f64,
    pub a: f64,
    pub k: usize,
    /// Block length; `None` for marginal estimates.
    pub n: Option<usize>,
    /// Set when the kernel itself averages over sampled sign vectors.
    pub sign_sampled: bool,
}

/// Sum over the grid of kernel values for every subset in the lexicographic
/// rank range `[start, end)`.
fn exhaustive_chunk(
    phi: &DMatrix<f64>,
    kernel: &dyn BoundedKernel,
    grid: &[f64],
    start: u128,
    end: u128,
) -> Result<Vec<f64>> {
    let n = phi.ncols();
    let w = kernel.width();
    let mut idx = unrank_combination(n, w, start);
    let mut acc = vec![0.0; grid.len()];
    let mut r = start;
    while r < end {
        let sub = select_columns(phi, &idx);
        for (s, v) in acc.iter_mut().zip(kernel.eval_grid(&sub, grid)?) {
            *s += v;
        }
        r += 1;
        if r < end {
            next_combination(&mut idx, n);
        }
    }
    Ok(acc)
}

/// Exact U-statistic over every width-`w` column subset, at each grid point.
pub fn ustat_exhaustive_grid(
    phi: &DMatrix<f64>,
    kernel: &dyn BoundedKernel,
    grid: &[f64],
    cap: u128,
) -> Result<Vec<UStatResult>> {
    let n = phi.ncols();
    let w = kernel.width();
    if w == 0 || w > n {
        return Err(Error::InvalidDimensions(format!(
            "kernel width {w} must lie in 1..={n}"
        )));
    }
    let count = binomial(n as u64, w as u64).ok_or(Error::CapExceeded { count: u128::MAX, cap })?;
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    let chunks = count.div_ceil(CHUNK as u128) as usize;
    let partial: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c as u128 * CHUNK as u128;
            let end = (start + CHUNK as u128).min(count);
            exhaustive_chunk(phi, kernel, grid, start, end)
        })
        .collect::<Result<_>>()?;
    let mut sums = vec![0.0; grid.len()];
    for p in &partial {
        for (s, v) in sums.iter_mut().zip(p) {
            *s += v;
        }
    }
    Ok(grid
        .iter()
        .zip(sums)
        .map(|(&a, s)| UStatResult {
            value: (s / count as f64).clamp(0.0, 1.0),
            mode: EstimateMode::Exhaustive,
            trials: count as u64,
            ci_halfwidth: 0.0,
            a,
            k: kernel.subset_size(),
            n: Some(n),
            sign_sampled: kernel.is_sampled(),
        })
        .collect())
}

pub fn ustat_exhaustive(phi: &DMatrix<f64>, kernel: &dyn BoundedKernel, a: f64) -> Result<UStatResult> {
    Ok(ustat_exhaustive_grid(phi, kernel, &[a], DEFAULT_ENUMERATION_CAP)?.remove(0))
}

/// Running first and second moments per grid point.
#[derive(Clone)]
struct Moments {
    sum: Vec<f64>,
    sumsq: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Self {
            sum: vec![0.0; len],
            sumsq: vec![0.0; len],
        }
    }

    fn push(&mut self, vals: &[f64]) {
        for ((s, q), v) in self.sum.iter_mut().zip(self.sumsq.iter_mut()).zip(vals) {
            *s += v;
            *q += v * v;
        }
    }

    fn merge(&mut self, other: &Moments) {
        for (s, o) in self.sum.iter_mut().zip(&other.sum) {
            *s += o;
        }
        for (s, o) in self.sumsq.iter_mut().zip(&other.sumsq) {
            *s += o;
        }
    }

    fn finish(&self, trials: u64) -> Vec<(f64, f64)> {
        let t = trials as f64;
        self.sum
            .iter()
            .zip(&self.sumsq)
            .map(|(&s, &q)| {
                let mean = s / t;
                let var = if trials > 1 {
                    ((q - s * s / t) / (t - 1.0)).max(0.0)
                } else {
                    0.0
                };
                (mean.clamp(0.0, 1.0), Z95 * (var / t).sqrt())
            })
            .collect()
    }
}

/// Averages `trials` kernel evaluations produced by `draw(t)` in
/// deterministic chunk order.
fn mc_reduce<F>(trials: u64, grid_len: usize, draw: F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    let chunks = trials.div_ceil(CHUNK as u64);
    let partial: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut m = Moments::new(grid_len);
            let start = c * CHUNK as u64;
            for t in start..(start + CHUNK as u64).min(trials) {
                m.push(&draw(t)?);
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let mut total = Moments::new(grid_len);
    for p in &partial {
        total.merge(p);
    }
    Ok(total.finish(trials))
}

/// Unbiased estimate of `U_n(a)` from `trials` subsets drawn uniformly with
/// replacement.
pub fn ustat_mc_grid(
    phi: &DMatrix<f64>,
    kernel: &dyn BoundedKernel,
    grid: &[f64],
    trials: u64,
    seed: SeedSpec,
) -> Result<Vec<UStatResult>> {
    let n = phi.ncols();
    let w = kernel.width();
    if w == 0 || w > n {
        return Err(Error::InvalidDimensions(format!(
            "kernel width {w} must lie in 1..={n}"
        )));
    }
    let stats = mc_reduce(trials, grid.len(), |t| {
        let mut rng = seed.child(t).rng();
        let mut idx = sample_indices(&mut rng, n, w).into_vec();
        idx.sort_unstable();
        kernel.eval_grid(&select_columns(phi, &idx), grid)
    })?;
    Ok(grid
        .iter()
        .zip(stats)
        .map(|(&a, (value, ci))| UStatResult {
            value,
            mode: EstimateMode::MonteCarlo,
            trials,
            ci_halfwidth: ci,
            a,
            k: kernel.subset_size(),
            n: Some(n),
            sign_sampled: kernel.is_sampled(),
        })
        .collect())
}

pub fn ustat_mc(
    phi: &DMatrix<f64>,
    kernel: &dyn BoundedKernel,
    a: f64,
    trials: u64,
    seed: SeedSpec,
) -> Result<UStatResult> {
    Ok(ustat_mc_grid(phi, kernel, &[a], trials, seed)?.remove(0))
}

/// Estimate of `p(a) = E g(A_S, a)` from `trials` fresh `m x w` draws.
pub fn marginal_mean_mc_grid(
    spec: &EnsembleSpec,
    kernel: &dyn BoundedKernel,
    grid: &[f64],
    trials: u64,
    seed: SeedSpec,
) -> Result<Vec<UStatResult>> {
    let w = kernel.width();
    let stats = mc_reduce(trials, grid.len(), |t| {
        let sub = sample_submatrix_columns(spec, w, seed.child(t))?;
        kernel.eval_grid(&sub, grid)
    })?;
    Ok(grid
        .iter()
        .zip(stats)
        .map(|(&a, (value, ci))| UStatResult {
            value,
            mode: EstimateMode::MonteCarlo,
            trials,
            ci_halfwidth: ci,
            a,
            k: kernel.subset_size(),
            n: None,
            sign_sampled: kernel.is_sampled(),
        })
        .collect())
}

pub fn marginal_mean_mc(
    spec: &EnsembleSpec,
    kernel: &dyn BoundedKernel,
    a: f64,
    trials: u64,
    seed: SeedSpec,
) -> Result<UStatResult> {
    Ok(marginal_mean_mc_grid(spec, kernel, &[a], trials, seed)?.remove(0))
}

/// Almost-sure deviation bound `ε_n` on `|U_n(a) − p(a)|`.
///
/// The bound is asymptotic (it holds once `n` is large enough, with no
/// explicit threshold); `asymptotic` is always set as a reminder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationEnvelope {
    pub epsilon_n: f64,
    pub p: f64,
    pub n_over_k: f64,
    pub asymptotic: bool,
}

fn check_n_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || n <= k {
        Err(Error::OutOfRange(format!("need n > k >= 1 (n={n}, k={k})")))
    } else {
        Ok(())
    }
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("p={p} is not a probability")))
    }
}

/// `ε_n² = 2 p (1−p) (k/n) ln(n/k)`.
pub fn deviation_envelope(p: f64, n: usize, k: usize) -> Result<DeviationEnvelope> {
    check_prob(p)?;
    check_n_k(n, k)?;
    let omega = n as f64 / k as f64;
    let eps2 = 2.0 * p * (1.0 - p) * omega.ln() / omega;
    Ok(DeviationEnvelope {
        epsilon_n: eps2.max(0.0).sqrt(),
        p,
        n_over_k: omega,
        asymptotic: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledFraction {
    /// `min((n−k)·value, 1)`.
    pub value: f64,
    /// `(n−k)·value` before clamping.
    pub raw: f64,
    /// Set when the raw bound exceeds 1.
    pub vacuous: bool,
}

/// Upper bound `(n−k)·U_n(a)` on the fraction of subsets (or sign-subset
/// pairs) failing a projection condition.
pub fn scaled_fraction_bound(value: f64, n: usize, k: usize) -> Result<ScaledFraction> {
    check_n_k(n, k)?;
    let raw = (n - k) as f64 * value;
    Ok(ScaledFraction {
        value: raw.min(1.0),
        raw,
        vacuous: raw > 1.0,
    })
}

/// `√p · (1 + √(2 (k/n) ln(n/k)))`, an upper envelope for `U_n(a)`.
pub fn ustat_upper_envelope(p: f64, n: usize, k: usize) -> Result<f64> {
    check_prob(p)?;
    check_n_k(n, k)?;
    let omega = n as f64 / k as f64;
    Ok(p.sqrt() * (1.0 + (2.0 * omega.ln() / omega).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_matrix, Law};
    use crate::kernels::{Kernel, KernelId};
    use approx::assert_relative_eq;

    struct Constant {
        w: usize,
        value: f64,
    }

    impl BoundedKernel for Constant {
        fn width(&self) -> usize {
            self.w
        }
        fn label(&self) -> String {
            "const".into()
        }
        fn eval_grid(&self, _a: &DMatrix<f64>, grid: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![self.value; grid.len()])
        }
    }

    fn phi(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
        sample_matrix(&EnsembleSpec::new(Law::Gaussian, m, n), SeedSpec::new(seed)).unwrap()
    }

    #[test]
    fn single_subset_equals_kernel() {
        let p = phi(6, 3, 1);
        let kern = Kernel::new(KernelId::EigMin, 3).unwrap();
        let u = ustat_exhaustive(&p, &kern, 0.4).unwrap();
        assert_eq!(u.value, kern.eval(&p, 0.4).unwrap());
        assert_eq!(u.trials, 1);
    }

    #[test]
    fn constant_kernels() {
        let p = phi(4, 7, 2);
        let one = Constant { w: 2, value: 1.0 };
        assert_eq!(ustat_exhaustive(&p, &one, 0.0).unwrap().value, 1.0);
        let zero = Constant { w: 2, value: 0.0 };
        let r = ustat_mc(&p, &zero, 0.0, 100, SeedSpec::new(3)).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.ci_halfwidth, 0.0);
    }

    #[test]
    fn cap_enforced() {
        let p = phi(3, 40, 2);
        let one = Constant { w: 6, value: 1.0 };
        let err = ustat_exhaustive_grid(&p, &one, &[0.0], DEFAULT_ENUMERATION_CAP).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn mc_is_deterministic() {
        let p = phi(8, 12, 4);
        let kern = Kernel::new(KernelId::EigMax, 2).unwrap();
        let a = ustat_mc(&p, &kern, 1.5, 1000, SeedSpec::new(9)).unwrap();
        let b = ustat_mc(&p, &kern, 1.5, 1000, SeedSpec::new(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn envelope_examples() {
        let e = deviation_envelope(0.5, 200, 2).unwrap();
        assert_relative_eq!(e.epsilon_n * e.epsilon_n, 0.023_025_85, epsilon = 1e-7);
        assert_relative_eq!(e.epsilon_n, 0.151_74, epsilon = 1e-5);
        assert_eq!(deviation_envelope(0.0, 200, 2).unwrap().epsilon_n, 0.0);
        assert_eq!(deviation_envelope(1.0, 200, 2).unwrap().epsilon_n, 0.0);
        assert!(deviation_envelope(0.5, 2, 2).is_err());
    }

    #[test]
    fn scaled_fraction_examples() {
        assert_eq!(scaled_fraction_bound(0.0, 50, 3).unwrap().value, 0.0);
        let s = scaled_fraction_bound(0.001, 1000, 4).unwrap();
        assert_relative_eq!(s.value, 0.996, epsilon = 1e-12);
        assert!(!s.vacuous);
        let s = scaled_fraction_bound(0.01, 1000, 4).unwrap();
        assert_eq!(s.value, 1.0);
        assert!(s.vacuous);
    }

    #[test]
    fn upper_envelope_examples() {
        assert_relative_eq!(ustat_upper_envelope(1.0, 1_000_000, 1).unwrap(), 1.005_257, epsilon = 1e-6);
        assert_eq!(ustat_upper_envelope(0.0, 100, 2).unwrap(), 0.0);
        assert_relative_eq!(ustat_upper_envelope(0.25, 100, 2).unwrap(), 0.697_81, epsilon = 1e-4);
    }
}
