//! U-statistics of random sensing matrices, the average-case recovery
//! conditions built on them, and the solvers used to test those conditions
//! empirically.
//!
//! Start with [`ensembles::sample_matrix`], pick a kernel from [`kernels`],
//! and estimate its tail fraction with [`ustat`]. [`bounds`] holds the
//! closed-form counterparts; [`conditions`] and [`solvers`] tie them to
//! actual recovery.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod combinatorics;
pub mod conditions;
pub mod ensembles;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod reference;
pub mod rng;
pub mod solvers;
pub mod ustat;

pub use error::{Error, Result};
pub use rng::SeedSpec;
