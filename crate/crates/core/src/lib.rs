//! Few-vector `(p,q)`-summing norms, operator norms and cotype constants of
//! finite-rank operators between finite-dimensional `ℓ_p` spaces.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); exponents
//! are exact rationals. The `f64` aliases at the crate root cover the common case.

// Negated comparisons below are NaN guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ascent;
pub mod cotype;
mod enumerate;
pub mod error;
pub mod estimate;
pub mod exponent;
pub mod family;
pub mod norms;
pub mod operators;
pub mod random;
pub mod reductions;
pub mod scalar;
pub mod summing;

pub use ascent::AscentConfig;
pub use cotype::{CotypeParams, EmbeddedNorm, VariableKind};
pub use error::{Error, Result};
pub use estimate::{BoundKind, NormEstimate, Witness};
pub use exponent::{conjugate, holder_split, Exponent, Rational};
pub use family::VectorFamily;
pub use norms::p_norm;
pub use operators::{bennett_best_of, bennett_sample, inclusion, MatrixOperator, SigmaDiagonal};
pub use reductions::{InequalityReport, QuotientInstance};
pub use scalar::Scalar;
pub use summing::{pi_estimate, pi_exact_linf_q1, strong_norm, weak_norm, SummingParams};

pub type Operator = MatrixOperator<f64>;
pub type Family = VectorFamily<f64>;
pub type Estimate = NormEstimate<f64>;
