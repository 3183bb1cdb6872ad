//! Self-contained optimality certificates for local-part LPs.
//!
//! A certificate lists the primal decomposition (strategies with weights)
//! and a dual value per cell. [`Certificate::verify`] re-derives every
//! optimality condition from scratch; the pricing gap is recomputed with a
//! branch-and-bound search that shares no code with the solver's pricer.

use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::boxes::Dims;
use crate::numeric::Rational;
use crate::strategies::LocalDetStrategy;

pub const CERTIFICATE_SCHEMA: &str = "prbox/certificate/v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimalTerm {
    pub strategy: LocalDetStrategy,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub dims: Dims,
    /// Box entries, one per cell.
    pub rhs: Vec<Rational>,
    pub primal: Vec<PrimalTerm>,
    /// One value per cell.
    pub dual: Vec<Rational>,
    /// Total primal weight.
    pub objective: Rational,
    /// `max_s (1 − Σ_{c ∈ supp s} y(c))` over all strategies, as reported
    /// by the solver.
    pub pricing_gap: Option<Rational>,
    pub certified: bool,
    /// Proven upper bound on the optimum (equals `objective` when
    /// certified).
    pub upper_bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CertificateError {
    #[error("certificate vectors do not match the alphabets")]
    Shape,
    #[error("primal term {index} has negative weight")]
    NegativeWeight { index: usize },
    #[error("cell (x={x}, y={y}, u={u}, v={v}) carries {load} but the box has only {available}")]
    CellExceeded { x: usize, y: usize, u: usize, v: usize, load: Rational, available: Rational },
    #[error("stated objective {stated} differs from the primal weight sum {primal}")]
    PrimalObjective { stated: Rational, primal: Rational },
    #[error("dual value at cell {cell} is negative")]
    NegativeDual { cell: usize },
    #[error("dual objective {dual} differs from the primal objective {primal}")]
    DualObjective { primal: Rational, dual: Rational },
    #[error("strategy {strategy} has reduced cost {gap} > 0")]
    PricingGap { gap: Rational, strategy: LocalDetStrategy },
    #[error("stated pricing gap {stated} differs from the recomputed {recomputed}")]
    GapMismatch { stated: Rational, recomputed: Rational },
    #[error("certificate is flagged as not certified")]
    NotCertified,
    #[error("malformed certificate JSON: {0}")]
    Json(String),
}

impl Certificate {
    /// `b − A x` per cell.
    pub fn slack(&self) -> Vec<Rational> {
        let mut s = self.rhs.clone();
        for t in &self.primal {
            for c in t.strategy.support() {
                s[c] -= &t.weight;
            }
        }
        s
    }

    /// Re-checks primal feasibility, dual feasibility (through an exact
    /// search over every strategy) and equality of objectives. Returns the
    /// recomputed pricing gap, which is `≤ 0` on success.
    pub fn verify(&self) -> Result<Rational, CertificateError> {
        let cells = self.dims.cells();
        if self.rhs.len() != cells || self.dual.len() != cells {
            return Err(CertificateError::Shape);
        }
        let mut load = vec![Rational::zero(); cells];
        let mut primal = Rational::zero();
        for (index, t) in self.primal.iter().enumerate() {
            if t.strategy.dims() != self.dims {
                return Err(CertificateError::Shape);
            }
            if t.weight.is_negative() {
                return Err(CertificateError::NegativeWeight { index });
            }
            primal += &t.weight;
            for c in t.strategy.support() {
                load[c] += &t.weight;
            }
        }
        for (c, (l, b)) in load.iter().zip(&self.rhs).enumerate() {
            if l > b {
                let (x, y, u, v) = self.dims.cell_coords(c);
                return Err(CertificateError::CellExceeded { x, y, u, v, load: l.clone(), available: b.clone() });
            }
        }
        if primal != self.objective {
            return Err(CertificateError::PrimalObjective { stated: self.objective.clone(), primal });
        }
        if let Some(cell) = self.dual.iter().position(Rational::is_negative) {
            return Err(CertificateError::NegativeDual { cell });
        }
        let dual: Rational = self.rhs.iter().zip(&self.dual).map(|(b, y)| b * y).sum();
        if dual != primal {
            return Err(CertificateError::DualObjective { primal, dual });
        }
        let hint = self.primal.first().map(|t| &t.strategy);
        let (min, witness) = min_dual_sum(self.dims, &self.dual, hint);
        let gap = &Rational::one() - &min;
        if gap.is_positive() {
            return Err(CertificateError::PricingGap { gap, strategy: witness });
        }
        if let Some(stated) = &self.pricing_gap {
            if stated != &gap {
                return Err(CertificateError::GapMismatch { stated: stated.clone(), recomputed: gap });
            }
        }
        if !self.certified {
            return Err(CertificateError::NotCertified);
        }
        Ok(gap)
    }

    pub fn to_json(&self) -> CertificateJson {
        let s = |r: &Rational| r.to_string();
        CertificateJson {
            schema: CERTIFICATE_SCHEMA.to_string(),
            dims: self.dims,
            rhs: self.rhs.iter().map(s).collect(),
            objective: s(&self.objective),
            upper_bound: s(&self.upper_bound),
            primal: self
                .primal
                .iter()
                .map(|t| TermJson { strategy: t.strategy.to_string(), weight: s(&t.weight) })
                .collect(),
            dual: self.dual.iter().map(s).collect(),
            pricing_gap: self.pricing_gap.as_ref().map(s),
            certified: self.certified,
        }
    }

    pub fn from_json(j: CertificateJson) -> Result<Self, CertificateError> {
        let bad = |e: String| CertificateError::Json(e);
        if j.schema != CERTIFICATE_SCHEMA {
            return Err(bad(format!("unknown schema {:?}", j.schema)));
        }
        let r = |t: &str| t.parse::<Rational>().map_err(|e| bad(e.to_string()));
        let rs = |v: &[String]| v.iter().map(|t| r(t)).collect::<Result<Vec<_>, _>>();
        let primal = j
            .primal
            .iter()
            .map(|t| {
                Ok(PrimalTerm {
                    strategy: LocalDetStrategy::parse(&t.strategy, j.dims).map_err(|e| bad(e.to_string()))?,
                    weight: r(&t.weight)?,
                })
            })
            .collect::<Result<Vec<_>, CertificateError>>()?;
        Ok(Certificate {
            dims: j.dims,
            rhs: rs(&j.rhs)?,
            primal,
            dual: rs(&j.dual)?,
            objective: r(&j.objective)?,
            pricing_gap: j.pricing_gap.as_deref().map(r).transpose()?,
            certified: j.certified,
            upper_bound: r(&j.upper_bound)?,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("certificate serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, CertificateError> {
        let j: CertificateJson = serde_json::from_str(s).map_err(|e| CertificateError::Json(e.to_string()))?;
        Certificate::from_json(j)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub strategy: String,
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub schema: String,
    pub dims: Dims,
    pub objective: String,
    pub upper_bound: String,
    pub certified: bool,
    pub pricing_gap: Option<String>,
    pub primal: Vec<TermJson>,
    pub dual: Vec<String>,
    pub rhs: Vec<String>,
}

/// `min_s Σ_{c ∈ supp s} y(c)` over all strategies, with a minimizer.
pub(crate) fn min_dual_sum(dims: Dims, y: &[Rational], hint: Option<&LocalDetStrategy>) -> (Rational, LocalDetStrategy) {
    let mut lcm = BigInt::one();
    for v in y {
        lcm = lcm.lcm(v.denom());
    }
    let ints: Vec<BigInt> = y.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    let limit = BigInt::one() << 100;
    let small: Option<Vec<i128>> = ints.iter().map(|v| if v.abs() < limit { v.to_i128() } else { None }).collect();
    let (sum, s) = match small {
        Some(w) => {
            let (sum, s) = BranchAndBound::new(dims, &w).run(hint);
            (BigInt::from(sum), s)
        }
        None => BranchAndBound::new(dims, &ints).run(hint),
    };
    (Rational::from_big(sum, lcm).expect("positive denominator"), s)
}

/// Depth-first search over Bob's outputs with the bound
/// `Σ_u min_x (S[u][x] + Σ_{v unassigned} min_y w(x, y, u, v))`.
struct BranchAndBound<'a, T> {
    dims: Dims,
    w: &'a [T],
    /// `rest[v][u * ox + x]`: `Σ_{v' ≥ v} min_y w(x, y, u, v')`.
    rest: Vec<Vec<T>>,
    best: Option<(T, Vec<u32>, Vec<u32>)>,
}

impl<'a, T> BranchAndBound<'a, T>
where
    T: Clone + Ord + Zero + Add<Output = T>,
{
    fn new(dims: Dims, w: &'a [T]) -> Self {
        let [iu, iv] = dims.inputs;
        let [ox, oy] = dims.outputs;
        let mut rest = vec![vec![T::zero(); iu * ox]; iv + 1];
        for v in (0..iv).rev() {
            for u in 0..iu {
                for x in 0..ox {
                    let m = (0..oy).map(|yy| w[dims.cell_index(x, yy, u, v)].clone()).min().expect("outputs");
                    rest[v][u * ox + x] = rest[v + 1][u * ox + x].clone() + m;
                }
            }
        }
        BranchAndBound { dims, w, rest, best: None }
    }

    fn value(&self, s: &LocalDetStrategy) -> T {
        s.support().fold(T::zero(), |acc, c| acc + self.w[c].clone())
    }

    /// Bound at depth `v` and Alice's minimizing answers.
    fn bound(&self, sums: &[T], v: usize) -> (T, Vec<u32>) {
        let [iu, _] = self.dims.inputs;
        let ox = self.dims.outputs[0];
        let mut total = T::zero();
        let mut f = Vec::with_capacity(iu);
        for u in 0..iu {
            let (mut bx, mut bv) = (0, None::<T>);
            for x in 0..ox {
                let t = sums[u * ox + x].clone() + self.rest[v][u * ox + x].clone();
                if bv.as_ref().is_none_or(|b| &t < b) {
                    bv = Some(t);
                    bx = x;
                }
            }
            total = total + bv.expect("outputs");
            f.push(bx as u32);
        }
        (total, f)
    }

    fn run(mut self, hint: Option<&LocalDetStrategy>) -> (T, LocalDetStrategy) {
        if let Some(h) = hint.filter(|h| h.dims() == self.dims) {
            self.best = Some((self.value(h), h.f().to_vec(), h.g().to_vec()));
        }
        let [iu, _] = self.dims.inputs;
        let ox = self.dims.outputs[0];
        let sums = vec![T::zero(); iu * ox];
        let mut g = Vec::new();
        self.search(&sums, &mut g);
        let (v, f, g) = self.best.expect("at least one strategy");
        (v, LocalDetStrategy::new(self.dims, f, g).expect("valid strategy"))
    }

    fn search(&mut self, sums: &[T], g: &mut Vec<u32>) {
        let [iu, iv] = self.dims.inputs;
        let [ox, oy] = self.dims.outputs;
        let v = g.len();
        if v == iv {
            let (val, f) = self.bound(sums, v);
            if self.best.as_ref().is_none_or(|(b, _, _)| &val < b) {
                self.best = Some((val, f, g.clone()));
            }
            return;
        }
        let mut children: Vec<(T, usize, Vec<T>)> = (0..oy)
            .map(|yy| {
                let mut next = sums.to_vec();
                for u in 0..iu {
                    for x in 0..ox {
                        let c = self.dims.cell_index(x, yy, u, v);
                        next[u * ox + x] = next[u * ox + x].clone() + self.w[c].clone();
                    }
                }
                let (b, _) = self.bound(&next, v + 1);
                (b, yy, next)
            })
            .collect();
        children.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        for (b, yy, next) in children {
            if self.best.as_ref().is_some_and(|(best, _, _)| &b >= best) {
                break;
            }
            g.push(yy as u32);
            self.search(&next, g);
            g.pop();
        }
    }
}
