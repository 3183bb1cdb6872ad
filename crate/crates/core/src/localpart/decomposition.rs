use std::fmt;
use std::str::FromStr;

use crate::boxes::{BoxTable, Dims, SignallingViolation};
use crate::lp::Certificate;
use crate::numeric::{Scalar, Var};
use crate::strategies::{depol_images, LocalDetStrategy};

use super::snk::snk_box;

/// A box written as weighted local deterministic strategies plus a
/// weighted remainder.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub dims: Dims,
    pub terms: Vec<(Scalar, LocalDetStrategy)>,
    pub remainder_weight: Scalar,
    pub remainder: BoxTable,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecompositionError {
    #[error("term {index} has alphabets {got:?}, expected {expected:?}")]
    Alphabet { index: usize, expected: Dims, got: Dims },
    #[error("term {index} has weight {weight}, which is negative somewhere in the admissible range")]
    NegativeWeight { index: usize, weight: Scalar },
    #[error("total mass {got} differs from the target mass {expected}")]
    MassMismatch { expected: Scalar, got: Scalar },
    #[error("cell (x={x}, y={y}, u={u}, v={v}): mixture gives {got}, target has {expected}")]
    CellMismatch { x: usize, y: usize, u: usize, v: usize, expected: Scalar, got: Scalar },
    #[error("remainder is negative at cell (x={x}, y={y}, u={u}, v={v}): {value}")]
    NegativeRemainder { x: usize, y: usize, u: usize, v: usize, value: Scalar },
    #[error("remainder is signalling: {0}")]
    Signalling(SignallingViolation),
}

impl Decomposition {
    /// Total weight of the local terms.
    pub fn local_weight(&self) -> Scalar {
        self.terms.iter().map(|(w, _)| w.clone()).sum()
    }

    /// `Σ w_i · s_i` as a box (unnormalized).
    pub fn local_box(&self) -> BoxTable {
        let mut table = vec![Scalar::zero(); self.dims.cells()];
        for (w, s) in &self.terms {
            for c in s.support() {
                table[c] = &table[c] + w;
            }
        }
        BoxTable::unchecked(self.dims, table)
    }

    /// The decomposition read off an LP certificate: the primal terms plus
    /// whatever of `target` they leave, normalized to mass 1.
    pub fn from_certificate(cert: &Certificate, target: &BoxTable) -> Option<Decomposition> {
        let rhs = target.rationals()?;
        let mass = target.mass().as_rational()?.clone();
        let slack = cert.slack();
        if slack.len() != rhs.len() {
            return None;
        }
        let rest = &mass - &cert.objective;
        let terms: Vec<(Scalar, LocalDetStrategy)> =
            cert.primal.iter().map(|t| (Scalar::from(t.weight.clone()), t.strategy.clone())).collect();
        let remainder = if rest.is_zero() {
            BoxTable::unchecked(target.dims(), vec![Scalar::zero(); rhs.len()])
        } else {
            let table = slack.iter().map(|s| Scalar::from(s / &rest)).collect();
            BoxTable::unchecked(target.dims(), table)
        };
        Some(Decomposition { dims: target.dims(), terms, remainder_weight: Scalar::from(rest), remainder })
    }
}

/// The decompositions written out in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KnownDecomposition {
    /// One isotropic box: 8 strategies at `ε/2`, rest `(1−4ε)·PR`.
    Eq3,
    /// One biased box: 3 strategies at `δ`, rest `(1−3δ)·PR`.
    Eq5,
    /// Two isotropic boxes: 64 images of each of two base strategies at
    /// `ε/16 − ε²/8` and `ε²/8`, rest `(1−4ε)·PR⊗PR`.
    Lemma3,
    /// `S_{2,1}`: the 64 images of `[0 0 0 1; 0 0 2 0]` at `1/64` each,
    /// rest the non-local part `S_{2,1} − P_L`.
    AppendixPl,
}

impl KnownDecomposition {
    pub const ALL: [KnownDecomposition; 4] =
        [KnownDecomposition::Eq3, KnownDecomposition::Eq5, KnownDecomposition::Lemma3, KnownDecomposition::AppendixPl];

    /// The box the decomposition reproduces.
    pub fn target(self) -> BoxTable {
        let eps = Scalar::var(Var::Eps);
        match self {
            KnownDecomposition::Eq3 => BoxTable::isotropic(1, &eps).expect("symbolic ε"),
            KnownDecomposition::Eq5 => BoxTable::biased(1, &Scalar::var(Var::Delta)).expect("symbolic δ"),
            KnownDecomposition::Lemma3 => BoxTable::isotropic(2, &eps).expect("symbolic ε"),
            KnownDecomposition::AppendixPl => snk_box(2, 1),
        }
    }
}

impl FromStr for KnownDecomposition {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "eq3" => Ok(KnownDecomposition::Eq3),
            "eq5" => Ok(KnownDecomposition::Eq5),
            "lemma3" => Ok(KnownDecomposition::Lemma3),
            "appendix" | "appendix_PL" | "appendix_pl" => Ok(KnownDecomposition::AppendixPl),
            _ => Err(format!("unknown decomposition {s:?} (expected eq3, eq5, lemma3 or appendix)")),
        }
    }
}

impl fmt::Display for KnownDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KnownDecomposition::Eq3 => "eq3",
            KnownDecomposition::Eq5 => "eq5",
            KnownDecomposition::Lemma3 => "lemma3",
            KnownDecomposition::AppendixPl => "appendix_PL",
        })
    }
}

fn parse(list: &[&str]) -> Vec<LocalDetStrategy> {
    list.iter().map(|s| LocalDetStrategy::parse_binary(s).expect("well-formed strategy literal")).collect()
}

/// Builds the named decomposition with symbolic weights.
pub fn known_decomposition(name: KnownDecomposition) -> Decomposition {
    let eps = Scalar::var(Var::Eps);
    let delta = Scalar::var(Var::Delta);
    let target = name.target();
    let dims = target.dims();
    match name {
        KnownDecomposition::Eq3 => {
            let w = &eps * &Scalar::frac(1, 2);
            let strategies = parse(&[
                "[0 0; 0 0]",
                "[0 0; 0 1]",
                "[0 1; 0 0]",
                "[1 0; 0 1]",
                "[0 1; 1 0]",
                "[1 1; 1 0]",
                "[1 0; 1 1]",
                "[1 1; 1 1]",
            ]);
            Decomposition {
                dims,
                terms: strategies.into_iter().map(|s| (w.clone(), s)).collect(),
                remainder_weight: &Scalar::one() - &(&Scalar::frac(4, 1) * &eps),
                remainder: BoxTable::pr(1),
            }
        }
        KnownDecomposition::Eq5 => {
            let strategies = parse(&["[0 0; 0 1]", "[0 1; 1 0]", "[1 0; 1 1]"]);
            Decomposition {
                dims,
                terms: strategies.into_iter().map(|s| (delta.clone(), s)).collect(),
                remainder_weight: &Scalar::one() - &(&Scalar::frac(3, 1) * &delta),
                remainder: BoxTable::pr(1),
            }
        }
        KnownDecomposition::Lemma3 => {
            let eps2 = eps.pow(2);
            let w1 = &(&eps * &Scalar::frac(1, 16)) - &(&eps2 * &Scalar::frac(1, 8));
            let w2 = &eps2 * &Scalar::frac(1, 8);
            let bases = parse(&["[0 0 0 1; 0 0 2 0]", "[0 0 0 1; 0 0 0 2]"]);
            let mut terms = Vec::with_capacity(128);
            for (base, w) in bases.iter().zip([w1, w2]) {
                terms.extend(depol_images(base).into_iter().map(|s| (w.clone(), s)));
            }
            Decomposition {
                dims,
                terms,
                remainder_weight: &Scalar::one() - &(&Scalar::frac(4, 1) * &eps),
                remainder: BoxTable::pr(2),
            }
        }
        KnownDecomposition::AppendixPl => {
            let base = parse(&["[0 0 0 1; 0 0 2 0]"]).remove(0);
            let w = Scalar::frac(1, 64);
            let terms: Vec<_> = depol_images(&base).into_iter().map(|s| (w.clone(), s)).collect();
            let mut d = Decomposition { dims, terms, remainder_weight: Scalar::one(), remainder: target.clone() };
            let local = d.local_box();
            let table = target.table().iter().zip(local.table()).map(|(a, b)| a - b).collect();
            d.remainder = BoxTable::unchecked(dims, table);
            d
        }
    }
}

/// Checks that the decomposition reproduces `target` exactly (symbolically
/// for symbolic boxes), that every weight is nonnegative over the
/// admissible range, and that the remainder is a nonnegative
/// non-signalling box.
pub fn verify_decomposition(d: &Decomposition, target: &BoxTable) -> Result<(), DecompositionError> {
    let dims = target.dims();
    for (index, (w, s)) in d.terms.iter().enumerate() {
        if s.dims() != dims {
            return Err(DecompositionError::Alphabet { index, expected: dims, got: s.dims() });
        }
        if !w.is_nonneg() {
            return Err(DecompositionError::NegativeWeight { index, weight: w.clone() });
        }
    }
    if d.remainder.dims() != dims {
        return Err(DecompositionError::Alphabet { index: d.terms.len(), expected: dims, got: d.remainder.dims() });
    }
    if !d.remainder_weight.is_nonneg() {
        return Err(DecompositionError::NegativeWeight { index: d.terms.len(), weight: d.remainder_weight.clone() });
    }
    let total_mass = &d.local_weight() + &(&d.remainder_weight * d.remainder.mass());
    if &total_mass != target.mass() {
        return Err(DecompositionError::MassMismatch { expected: target.mass().clone(), got: total_mass });
    }
    let local = d.local_box();
    for (idx, (t, r)) in target.table().iter().zip(d.remainder.table()).enumerate() {
        let (x, y, u, v) = dims.cell_coords(idx);
        if !r.is_nonneg() {
            return Err(DecompositionError::NegativeRemainder { x, y, u, v, value: r.clone() });
        }
        let got = &local.table()[idx] + &(&d.remainder_weight * r);
        if &got != t {
            return Err(DecompositionError::CellMismatch { x, y, u, v, expected: t.clone(), got });
        }
    }
    if let Some(v) = d.remainder.signalling_violation() {
        return Err(DecompositionError::Signalling(v));
    }
    Ok(())
}
