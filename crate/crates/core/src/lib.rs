//! Multivariate Bernstein polynomials on the unit cube, the unit simplex and
//! mixed simplex×cube domains.
//!
//! The crate builds Bernstein approximations from samples of a function on a
//! lattice, evaluates them and their mixed partial derivatives of any
//! multi-index order, and provides the independent machinery used to check
//! those derivatives: mixed finite differences, an iterated-integral identity
//! evaluated by Gauss–Legendre quadrature, a differentiated-basis oracle and
//! Monte Carlo estimators built on binomial and multinomial samplers.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![deny(rust_2018_idioms)]

extern crate alloc;

pub mod bernstein;
pub mod domain;
mod error;
pub mod field;
pub mod finite_diff;
pub mod harness;
pub mod multiindex;
pub mod quadrature;
pub mod stochastic;

pub use bernstein::{BernsteinModel, DerivativeModel};
pub use domain::{Domain, EvalPoint};
pub use error::{Error, Result};
pub use field::{DomainHint, FnField, ScalarField};
pub use finite_diff::DiffSpec;
pub use harness::{ConvergenceReport, FunctionSpec, GridSpec};
pub use multiindex::{LatticeKind, MultiIndex};
pub use stochastic::{McReport, RngSeed};

/// Absolute distance by which a coordinate may leave the domain and still be
/// clamped back onto the boundary.
pub const DOMAIN_CLAMP_TOL: f64 = 1e-12;
