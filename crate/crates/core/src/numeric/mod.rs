//! Exact scalars: arbitrary-precision rationals, dense polynomials in the
//! noise parameter, and the [`Scalar`] union used for box entries.
//!
//! Nothing here touches floating point.

mod poly;
mod rational;
mod scalar;

pub use poly::{Poly, Var};
pub(crate) use poly::binomial;
pub use rational::Rational;
pub use scalar::{Scalar, ScalarRepr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {0:?} as a rational (expected p or p/q)")]
    Parse(String),
    #[error("duplicate abscissa {0}")]
    DuplicateAbscissa(String),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("no polynomial of the requested degree fits point {index}")]
    NoFit { index: usize },
    #[error("polynomial division leaves a remainder")]
    NotDivisible,
}
