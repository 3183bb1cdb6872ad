//! Local parts of named box families: exact solves, closed-form
//! envelopes, explicit decompositions, parameter sweeps and the mixed
//! tensor words `S_{n,k}`.

mod bounds;
mod decomposition;
mod snk;
mod sweep;

pub use bounds::{lower_bound_isotropic, pairing_lower_bound, upper_bound_isotropic, Envelope};
pub use decomposition::{known_decomposition, verify_decomposition, Decomposition, DecompositionError, KnownDecomposition};
pub use snk::{p_quarter, snk, snk_box, snk_expansion_check, SnkReport, MAX_SNK_N};
pub use sweep::{default_grid, grid, sweep, Piece, SweepOptions, SweepPoint, SweepResult};

use std::fmt;
use std::str::FromStr;

use crate::boxes::{BoxError, BoxTable, RangeCheck};
use crate::lp::{column_generation, full_lp, Certificate, ColGenOptions, ColGenReport, LpError};
use crate::numeric::{Rational, Scalar, Var};
use crate::strategies::{StrategyError, DEFAULT_BUDGET};

#[derive(Debug, thiserror::Error)]
pub enum LocalPartError {
    #[error("the box is symbolic; evaluate it at a rational parameter first")]
    Symbolic,
    #[error("full enumeration needs {needed} strategies, over the budget of {budget}; use column generation")]
    OverBudget { needed: u128, budget: u128 },
    #[error("S_(n,k) needs 0 <= k <= n <= {max}, got n={n}, k={k}")]
    SnkRange { n: u32, k: u32, max: u32 },
    #[error("sweep point {0} lies outside the admissible range")]
    GridRange(Rational),
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// How the LP is solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Every strategy as an explicit column.
    Full,
    #[default]
    ColGen,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(Mode::Full),
            "colgen" => Ok(Mode::ColGen),
            _ => Err(format!("unknown mode {s:?} (expected full or colgen)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::ColGen => "colgen",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub mode: Mode,
    /// Strategy-count budget for [`Mode::Full`].
    pub budget: u128,
    pub colgen: ColGenOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { mode: Mode::ColGen, budget: DEFAULT_BUDGET, colgen: ColGenOptions::default() }
    }
}

impl SolveOptions {
    pub fn with_mode(mode: Mode) -> Self {
        SolveOptions { mode, ..Default::default() }
    }
}

/// A solved local part.
#[derive(Clone, Debug)]
pub struct LocalPart {
    /// Optimal total weight of local strategies.
    pub value: Rational,
    pub mass: Rational,
    /// `value / mass`.
    pub fraction: Rational,
    pub certificate: Certificate,
    pub iterations: usize,
    pub columns: usize,
    pub master_rows: usize,
}

impl LocalPart {
    pub fn certified(&self) -> bool {
        self.certificate.certified
    }
}

/// The box families with a noise parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Isotropic,
    Biased,
}

impl Family {
    pub fn var(self) -> Var {
        match self {
            Family::Isotropic => Var::Eps,
            Family::Biased => Var::Delta,
        }
    }

    pub fn make(self, n: u32, param: &Scalar, check: RangeCheck) -> Result<BoxTable, BoxError> {
        match self {
            Family::Isotropic => BoxTable::isotropic_with(n, param, check),
            Family::Biased => BoxTable::biased_with(n, param, check),
        }
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "isotropic" => Ok(Family::Isotropic),
            "biased" => Ok(Family::Biased),
            _ => Err(format!("unknown family {s:?} (expected isotropic or biased)")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Isotropic => "isotropic",
            Family::Biased => "biased",
        })
    }
}

/// Solves the local-part LP of a box with rational entries.
pub fn local_part(b: &BoxTable, opts: &SolveOptions) -> Result<LocalPart, LocalPartError> {
    let rhs = b.rationals().ok_or(LocalPartError::Symbolic)?;
    let mass = b.mass().as_rational().cloned().ok_or(LocalPartError::Symbolic)?;
    let dims = b.dims();
    let report: ColGenReport = match opts.mode {
        Mode::Full => full_lp(dims, &rhs, opts.budget).map_err(|e| match e {
            LpError::Strategy(StrategyError::BudgetExceeded { count, budget }) => {
                LocalPartError::OverBudget { needed: count, budget }
            }
            e => e.into(),
        })?,
        Mode::ColGen => column_generation(dims, &rhs, &opts.colgen)?,
    };
    let value = report.certificate.objective.clone();
    let fraction = if mass.is_zero() { Rational::zero() } else { &value / &mass };
    Ok(LocalPart {
        value,
        mass,
        fraction,
        certificate: report.certificate,
        iterations: report.iterations,
        columns: report.columns,
        master_rows: report.master_rows,
    })
}
