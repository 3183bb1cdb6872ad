//! Exact local-part computations for noisy PR boxes.

pub mod boxes;
pub mod localpart;
pub mod lp;
pub mod numeric;
pub mod strategies;

pub use boxes::{BoxError, BoxTable, Dims};
pub use localpart::{local_part, LocalPart, LocalPartError, SolveOptions};
pub use numeric::{Poly, Rational, Scalar, Var};
pub use strategies::LocalDetStrategy;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/boxes.md")]
    mod boxes {}
    #[doc = include_str!("../../../book/src/strategies.md")]
    mod strategies {}
    #[doc = include_str!("../../../book/src/local-part.md")]
    mod local_part {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
