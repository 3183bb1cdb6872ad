//! Exact linear programming for local parts: a rational simplex, a
//! column-generation driver with exact pricing, and self-contained
//! optimality certificates.

mod certificate;
mod colgen;
mod float;
pub mod pricing;
mod simplex;

pub use certificate::{Certificate, CertificateError, CertificateJson, PrimalTerm, CERTIFICATE_SCHEMA};
pub use colgen::{column_generation, full_lp, ColGenOptions, ColGenReport};
pub use simplex::{solve_exact, verify_solution, Column, LpProblem, LpSolution, LpViolation, Simplex, Status};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("right-hand side of row {row} is negative; only b ≥ 0 is supported")]
    NegativeRhs { row: usize },
    #[error("problem is unbounded (entering {column:?})")]
    Unbounded { column: Option<usize> },
    #[error("column {column} references row {row}, which does not exist")]
    Dimension { column: usize, row: usize },
    #[error("the right-hand side must be rational; evaluate the box first")]
    Symbolic,
    #[error("column generation needs binary alphabets with at most 6 boxes")]
    Unsupported,
    #[error(transparent)]
    Strategy(#[from] crate::strategies::StrategyError),
}
