//! Moment generating functions of rational functions along curves.
//!
//! For rational `P`, `q` and an oriented curve `γ` the crate decides whether
//! `I(t) = (1/2πi)∫_γ q(z)dz/(P(z)−t)` is rational or identically zero near
//! infinity, combining exact Laurent arithmetic, numerical continuation of
//! the branches of `P⁻¹` and permutation-group computations.

pub mod algebra;
pub mod branches;
pub mod constellation;
pub mod curves;
pub mod error;
pub mod laurent_moment;
pub mod moments;
pub mod qmodule;

pub use algebra::{GaussianRational, LaurentPolynomial, Poly, RationalFunction};
pub use curves::Curve;
pub use error::{Error, Result};
