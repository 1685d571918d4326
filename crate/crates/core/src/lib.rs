//! Quadratic representations `f = ±p² ± q² ± r²` of real ternary quartics.
//!
//! The crate builds the affine family of 6×6 Gram matrices of a quartic, finds
//! every rank-3 member numerically, and turns each one into an explicit
//! signed (or complex) representation that is re-verified against the input.
//! Smoothness of the curve `f = 0` is decided exactly with a Macaulay
//! resultant; non-negativity is decided numerically with a certificate or a
//! counterexample.

pub mod classify;
pub mod corpus;
pub mod curve;
pub mod error;
pub mod form;
pub mod gram;
pub mod macaulay;
pub mod newton;
pub mod parse;
pub mod scalar;
pub mod solver;
pub mod symmat;

pub use classify::{
    certify_count, factor_complex, factor_real, theorem1_check, verify_representation, ClassRepresentation,
    ComplexRepresentation, CountReport, RealRepresentation, Representation, TheoremError, TheoremReport, Verdict,
};
pub use curve::{nonnegativity_test, smoothness_test, CurveStatus, Nonnegativity, PositivityStatus};
pub use error::{FormError, GramError, HypothesisFailure};
pub use form::{quad_product, quad_square, Form, QuadraticForm, TernaryQuartic, MONOMIAL_ORDER};
pub use gram::{gram_to_quartic, representation_to_gram, GramFamily, GramPoint, Reality, Signature};
pub use parse::parse_quartic;
pub use solver::{solve_all, Counts, SolutionSet, SolveConfig};
pub use symmat::SymMatrix6;
pub use scalar::{FromRational, Magnitude, Scalar};

pub use num_complex::Complex64;
pub use num_rational::BigRational;

/// Exact quartic, the form of every parsed input.
pub type Quartic = TernaryQuartic<BigRational>;
pub type RationalQuadratic = QuadraticForm<BigRational>;
pub type RealQuadratic = QuadraticForm<f64>;
pub type ComplexQuadratic = QuadraticForm<Complex64>;
