//! Random sensing matrices with IID columns.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeedSpec;

/// Distribution of the matrix entries. All three laws have mean 0 and
/// variance `1/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Law {
    /// `N(0, 1/m)`.
    Gaussian,
    /// Uniform on `{-1/sqrt(m), +1/sqrt(m)}`.
    Bernoulli,
    /// Uniform on `[-sqrt(3/m), +sqrt(3/m)]`.
    Uniform,
}

impl Law {
    pub fn name(&self) -> &'static str {
        match self {
            Law::Gaussian => "gaussian",
            Law::Bernoulli => "bernoulli",
            Law::Uniform => "uniform",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Law {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(Law::Gaussian),
            "bernoulli" | "rademacher" => Ok(Law::Bernoulli),
            "uniform" => Ok(Law::Uniform),
            other => Err(Error::Parse(format!("unknown law '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Columns have unit squared norm in expectation.
    #[default]
    InExpectation,
    /// Every sampled column is rescaled to unit l2 norm.
    ExactUnitColumns,
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "in_expectation" | "expectation" => Ok(Normalization::InExpectation),
            "exact_unit_columns" | "exact" | "unit" => Ok(Normalization::ExactUnitColumns),
            other => Err(Error::Parse(format!("unknown normalization '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub law: Law,
    pub m: usize,
    pub n: usize,
    #[serde(default)]
    pub normalization: Normalization,
}

impl EnsembleSpec {
    pub fn new(law: Law, m: usize, n: usize) -> Self {
        Self {
            law,
            m,
            n,
            normalization: Normalization::InExpectation,
        }
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    fn fill_column<R: Rng>(&self, rng: &mut R, col: &mut [f64]) {
        let m = self.m as f64;
        match self.law {
            Law::Gaussian => {
                let sd = 1.0 / m.sqrt();
                for v in col.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *v = sd * z;
                }
            }
            Law::Bernoulli => {
                let mag = 1.0 / m.sqrt();
                for v in col.iter_mut() {
                    *v = if rng.random::<bool>() { mag } else { -mag };
                }
            }
            Law::Uniform => {
                let b = (3.0 / m).sqrt();
                for v in col.iter_mut() {
                    *v = rng.random_range(-b..=b);
                }
            }
        }
        if self.normalization == Normalization::ExactUnitColumns {
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                col.iter_mut().for_each(|v| *v /= norm);
            }
        }
    }

    fn sample_columns(&self, ncols: usize, seed: SeedSpec) -> DMatrix<f64> {
        let mut out = DMatrix::<f64>::zeros(self.m, ncols);
        for j in 0..ncols {
            let mut rng = seed.child(j as u64).rng();
            let mut col = out.column_mut(j);
            self.fill_column(&mut rng, col.as_mut_slice());
        }
        out
    }
}

/// Draw an `m x n` matrix. Column `j` comes from substream `seed.child(j)`,
/// so the result is a pure function of `(spec, seed)`.
pub fn sample_matrix(spec: &EnsembleSpec, seed: SeedSpec) -> Result<DMatrix<f64>> {
    if spec.m == 0 || spec.n == 0 {
        return Err(Error::InvalidDimensions(format!(
            "m and n must be positive (m={}, n={})",
            spec.m, spec.n
        )));
    }
    Ok(spec.sample_columns(spec.n, seed))
}

/// Draw `k` fresh columns from the ensemble (`spec.n` is ignored). The
/// result is distributed as any `k` columns of [`sample_matrix`].
pub fn sample_submatrix_columns(spec: &EnsembleSpec, k: usize, seed: SeedSpec) -> Result<DMatrix<f64>> {
    if k == 0 {
        return Err(Error::InvalidDimensions("k must be at least 1".into()));
    }
    if spec.m == 0 {
        return Err(Error::InvalidDimensions("m must be positive".into()));
    }
    Ok(spec.sample_columns(k, seed))
}
