//! Exact arithmetic over ℚ(i): polynomials, rational functions, Laurent
//! polynomials, principal parts, parsing and JSON encodings.

pub mod gaussian;
pub mod json;
pub mod laurent;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod principal;
pub mod rational;
pub mod roots;

pub use gaussian::GaussianRational;
pub use laurent::{circle_residue, circle_residues, LaurentPolynomial};
pub use parse::{parse_laurent, parse_rational};
pub use poly::Poly;
pub use principal::PrincipalPart;
pub use rational::{Pole, RationalFunction};
