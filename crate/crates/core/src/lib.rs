//! Enumeration and certification of adversarial Bayes classifiers for
//! one-dimensional binary classification.
//!
//! Given class-conditional densities `p₀`, `p₁` and a perturbation radius `ε`,
//! [`solver::solve`] finds every minimizer of the adversarial risk
//! `R^ε(A) = ℙ₁((Aᶜ)^ε) + ℙ₀(A^ε)` up to equivalence, and [`certify`] checks
//! the minimum against a grid brute force and a discretized transport dual.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod conditions;
pub mod density;
pub mod error;
pub mod examples;
pub mod intervals;
pub mod normal;
pub mod par;
pub mod poly;
pub mod report;
pub mod risk;
pub mod solver;

pub use density::{Class, DensityComponent, DistributionPair};
pub use error::{Error, Result};
pub use intervals::{Interval, IntervalSet};
pub use par::Exec;
