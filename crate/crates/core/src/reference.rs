//! Published asymptotic worst-case bounds on the extreme squared singular
//! values of `k`-column submatrices of Gaussian matrices (Bah and Tanner),
//! kept as a static overlay for the average-case curves.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCaseEigenvalues {
    pub k_over_m: f64,
    pub m_over_n: f64,
    /// Lower bound on `σ²min` over all size-`k` subsets.
    pub sigma2_min: f64,
    /// Upper bound on `σ²max` over all size-`k` subsets.
    pub sigma2_max: f64,
}

const fn cell(k_over_m: f64, m_over_n: f64, sigma2_min: f64, sigma2_max: f64) -> WorstCaseEigenvalues {
    WorstCaseEigenvalues {
        k_over_m,
        m_over_n,
        sigma2_min,
        sigma2_max,
    }
}

/// Row-major over `k/m ∈ {0.1, 0.2, 0.3}`, then `m/n ∈ {0.1, 0.3, 0.5}`.
pub const WORST_CASE_EIGENVALUES: [WorstCaseEigenvalues; 9] = [
    cell(0.1, 0.1, 0.095, 3.952),
    cell(0.1, 0.3, 0.118, 3.610),
    cell(0.1, 0.5, 0.130, 3.459),
    cell(0.2, 0.1, 0.015, 5.587),
    cell(0.2, 0.3, 0.026, 4.892),
    cell(0.2, 0.5, 0.034, 4.535),
    cell(0.3, 0.1, 0.003, 6.939),
    cell(0.3, 0.3, 0.006, 5.806),
    cell(0.3, 0.5, 0.010, 5.361),
];

/// The tabulated cell at the given ratios, if there is one.
pub fn worst_case_eigenvalues(k_over_m: f64, m_over_n: f64) -> Option<WorstCaseEigenvalues> {
    WORST_CASE_EIGENVALUES
        .iter()
        .find(|c| (c.k_over_m - k_over_m).abs() < 1e-9 && (c.m_over_n - m_over_n).abs() < 1e-9)
        .copied()
}
