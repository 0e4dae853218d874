//! Analytic semi-conformal maps on domains of Euclidean 3-space built from
//! the ansatz `phi = (x + iy) u^(-q) psi(u, z)` with `u = (x^2 + y^2)/2`.
//!
//! `psi` is computed as a truncated bivariate power series from its Taylor
//! data along `u = 0`, compared with explicit solution families, and checked
//! against the coefficient identities those families satisfy.

pub mod closed_forms;
pub mod combin;
pub mod convergence;
pub mod error;
pub mod geometry;
pub mod identities;
pub mod scalar;
pub mod series;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::{CScalar, GaussianRational, Mode};
pub use series::{BiSeries, SeriesFile, Var};
pub use solver::{AnsatzMap, BoundaryData, Exponent, Point3};
