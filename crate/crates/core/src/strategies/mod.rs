//! Local deterministic strategies: the vertices of the local polytope.
//!
//! A strategy is a pair of functions `f: U → X` (Alice) and `g: V → Y`
//! (Bob). Its text form lists the outputs by input value, Alice first:
//! `[0 0 0 1; 0 0 2 0]` means `f = (0,0,0,1)` and `g = (0,0,2,0)`.

mod depol;
pub mod games;
mod symmetry;

use std::fmt;

use crate::boxes::{rounds_lost_at, BoxTable, Dims};
use crate::numeric::{Rational, Scalar};

pub use depol::{depol_group, depol_images, orbit, round_transposition, DepolElement, LocalRelabeling, DEPOL_DEFINITION};
pub use symmetry::CellSymmetry;

/// Default cap on explicit enumeration of strategy pairs.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrategyError {
    #[error("output {value} at input {input} exceeds alphabet size {size}")]
    OutputOutOfRange { input: usize, value: u32, size: usize },
    #[error("function has {got} entries, input alphabet has {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("cannot parse strategy {0:?} (expected \"[x0 x1 ...; y0 y1 ...]\")")]
    Parse(String),
    #[error("enumerating {count} strategies exceeds the budget of {budget}; use column generation")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("strategy alphabets {0:?} do not match box alphabets {1:?}")]
    AlphabetMismatch(Dims, Dims),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalDetStrategy {
    f: Vec<u32>,
    g: Vec<u32>,
    dims: Dims,
}

impl LocalDetStrategy {
    pub fn new(dims: Dims, f: Vec<u32>, g: Vec<u32>) -> Result<Self, StrategyError> {
        for (fun, ins, outs) in [(&f, dims.inputs[0], dims.outputs[0]), (&g, dims.inputs[1], dims.outputs[1])] {
            if fun.len() != ins {
                return Err(StrategyError::WrongLength { expected: ins, got: fun.len() });
            }
            if let Some((input, &value)) = fun.iter().enumerate().find(|(_, &o)| o as usize >= outs) {
                return Err(StrategyError::OutputOutOfRange { input, value, size: outs });
            }
        }
        Ok(LocalDetStrategy { f, g, dims })
    }

    /// Strategy for `n` binary boxes.
    pub fn binary(n: u32, f: Vec<u32>, g: Vec<u32>) -> Result<Self, StrategyError> {
        LocalDetStrategy::new(Dims::binary(n), f, g)
    }

    pub(crate) fn new_unchecked(dims: Dims, f: Vec<u32>, g: Vec<u32>) -> Self {
        LocalDetStrategy { f, g, dims }
    }

    /// Parses the text form, inferring `n` binary boxes from the number of
    /// entries per side.
    pub fn parse_binary(s: &str) -> Result<Self, StrategyError> {
        let (f, g) = parse_lists(s)?;
        let n = f.len().trailing_zeros();
        if !f.len().is_power_of_two() || f.len() != g.len() {
            return Err(StrategyError::Parse(s.to_string()));
        }
        LocalDetStrategy::binary(n, f, g)
    }

    pub fn parse(s: &str, dims: Dims) -> Result<Self, StrategyError> {
        let (f, g) = parse_lists(s)?;
        LocalDetStrategy::new(dims, f, g)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn f(&self) -> &[u32] {
        &self.f
    }

    pub fn g(&self) -> &[u32] {
        &self.g
    }

    /// Cell `(f(u), g(v), u, v)` covered at input pair `(u, v)`.
    #[inline]
    pub fn cell(&self, u: usize, v: usize) -> usize {
        self.dims.cell_index(self.f[u] as usize, self.g[v] as usize, u, v)
    }

    /// All covered cells, one per input pair, in `(u, v)` order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        let [iu, iv] = self.dims.inputs;
        (0..iu).flat_map(move |u| (0..iv).map(move |v| self.cell(u, v)))
    }

    /// Blockwise product: `self` acts on the most significant part of every
    /// letter, `other` on the rest.
    pub fn product(&self, other: &LocalDetStrategy) -> LocalDetStrategy {
        let (a, b) = (self.dims, other.dims);
        let dims = a.tensor(&b);
        let f = (0..dims.inputs[0])
            .map(|u| self.f[u / b.inputs[0]] * b.outputs[0] as u32 + other.f[u % b.inputs[0]])
            .collect();
        let g = (0..dims.inputs[1])
            .map(|v| self.g[v / b.inputs[1]] * b.outputs[1] as u32 + other.g[v % b.inputs[1]])
            .collect();
        LocalDetStrategy { f, g, dims }
    }

    /// Whether both functions factor into independent blocks acting on the
    /// first `split` boxes and on the remaining ones.
    pub fn is_product(&self, split: u32) -> bool {
        let Some(n) = self.dims.rounds() else { return false };
        if split == 0 || split >= n {
            return false;
        }
        let low_bits = n - split;
        factors(&self.f, low_bits) && factors(&self.g, low_bits)
    }

    /// Rounds `i` with `x_i ⊕ y_i ≠ u_i · v_i` at input `(u, v)`.
    pub fn rounds_lost(&self, u: usize, v: usize) -> u32 {
        rounds_lost_at(self.f[u] as usize, self.g[v] as usize, u, v)
    }

    /// Input pair losing the most rounds; ties go to the lexicographically
    /// smallest `(u, v)`.
    pub fn worst_input(&self) -> (usize, usize, u32) {
        let [iu, iv] = self.dims.inputs;
        let mut best = (0, 0, 0);
        for u in 0..iu {
            for v in 0..iv {
                let c = self.rounds_lost(u, v);
                if c > best.2 || (u, v) == (0, 0) {
                    best = (u, v, c);
                }
            }
        }
        best
    }

    /// Per-round feasibility against the maximally biased box: in every
    /// round `x_i(u_i=1) ≠ y_i(v_i=1)`, and `(x_i, y_i) ≠ (1, 0)` whenever
    /// `(u_i, v_i) ≠ (1, 1)`.
    pub fn biased_feasible(&self) -> bool {
        let Some(n) = self.dims.rounds() else { return false };
        let size = 1usize << n;
        for i in 0..n {
            let bit = 1usize << (n - 1 - i);
            for u in 0..size {
                let ui = u & bit != 0;
                let xi = self.f[u] as usize & bit != 0;
                for v in 0..size {
                    let vi = v & bit != 0;
                    let yi = self.g[v] as usize & bit != 0;
                    if ui && vi && xi == yi {
                        return false;
                    }
                    if !(ui && vi) && xi && !yi {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Mixed-radix index, Alice's function first; unique per dims.
    pub fn code(&self) -> u128 {
        let mut acc: u128 = 0;
        for &o in &self.f {
            acc = acc * self.dims.outputs[0] as u128 + o as u128;
        }
        for &o in &self.g {
            acc = acc * self.dims.outputs[1] as u128 + o as u128;
        }
        acc
    }
}

fn factors(fun: &[u32], low_bits: u32) -> bool {
    let low_mask = (1u32 << low_bits) - 1;
    fun.iter().enumerate().all(|(u, &x)| {
        let u = u as u32;
        // The high output block must depend only on the high input block and
        // the low block only on the low input block.
        fun.iter().enumerate().all(|(w, &y)| {
            let w = w as u32;
            let same_high = (u >> low_bits) == (w >> low_bits);
            let same_low = (u & low_mask) == (w & low_mask);
            (!same_high || (x >> low_bits) == (y >> low_bits)) && (!same_low || (x & low_mask) == (y & low_mask))
        })
    })
}

fn parse_lists(s: &str) -> Result<(Vec<u32>, Vec<u32>), StrategyError> {
    let bad = || StrategyError::Parse(s.to_string());
    let inner = s.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
    let (a, b) = inner.split_once(';').ok_or_else(bad)?;
    let list = |part: &str| -> Result<Vec<u32>, StrategyError> {
        part.split_whitespace().map(|t| t.parse::<u32>().map_err(|_| bad())).collect()
    };
    Ok((list(a)?, list(b)?))
}

impl fmt::Display for LocalDetStrategy {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        write!(fm, "[{}; {}]", join(&self.f), join(&self.g))
    }
}

impl fmt::Debug for LocalDetStrategy {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, fm)
    }
}

/// Largest weight the deterministic box of a strategy can take inside `b`
/// (the minimum entry of `b` over the strategy's support).
#[derive(Debug, Clone, PartialEq)]
pub struct MaxWeight {
    pub value: Scalar,
    /// Minimizing cell `(x, y, u, v)`.
    pub cell: (usize, usize, usize, usize),
    /// Parameter value used to order symbolic entries, if any.
    pub probe: Option<Rational>,
}

/// Probe used to order polynomial entries in [`max_weight`].
pub fn default_probe() -> Rational {
    Rational::frac(1, 8)
}

pub fn max_weight(s: &LocalDetStrategy, b: &BoxTable) -> Result<MaxWeight, StrategyError> {
    max_weight_with_probe(s, b, &default_probe())
}

/// For symbolic boxes the minimizing cell is chosen at `probe`; the
/// returned value is that cell's polynomial. Polynomial order may differ
/// elsewhere in the interval, so callers needing a global minimum should
/// evaluate the box first.
pub fn max_weight_with_probe(s: &LocalDetStrategy, b: &BoxTable, probe: &Rational) -> Result<MaxWeight, StrategyError> {
    if s.dims != b.dims() {
        return Err(StrategyError::AlphabetMismatch(s.dims, b.dims()));
    }
    let symbolic = b.is_symbolic();
    let mut best: Option<(Rational, usize)> = None;
    for cell in s.support() {
        let key = b.table()[cell].eval(probe);
        if best.as_ref().is_none_or(|(k, _)| &key < k) {
            best = Some((key, cell));
        }
    }
    let (_, cell) = best.expect("strategy has at least one input pair");
    Ok(MaxWeight {
        value: b.table()[cell].clone(),
        cell: b.dims().cell_coords(cell),
        probe: symbolic.then(|| probe.clone()),
    })
}

/// Which side(s) to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Both,
    Alice,
    Bob,
}

/// Number of strategies (or one-sided functions) for `n` binary boxes.
pub fn strategy_count(n: u32, side: Side) -> u128 {
    let size = 1u128 << n;
    let one_side = size.checked_pow(size as u32).unwrap_or(u128::MAX);
    match side {
        Side::Both => one_side.saturating_mul(one_side),
        Side::Alice | Side::Bob => one_side,
    }
}

fn function_count(inputs: usize, outputs: usize) -> u128 {
    (outputs as u128).checked_pow(inputs as u32).unwrap_or(u128::MAX)
}

/// Every function `[0, inputs) → [0, outputs)` in lexicographic order of
/// its value list.
#[derive(Clone, Debug)]
pub struct FunctionIter {
    inputs: usize,
    outputs: usize,
    next: u128,
    end: u128,
}

impl FunctionIter {
    pub fn new(inputs: usize, outputs: usize) -> Self {
        FunctionIter { inputs, outputs, next: 0, end: function_count(inputs, outputs) }
    }

    pub fn len(&self) -> u128 {
        self.end - self.next
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub(crate) fn decode_function(mut index: u128, inputs: usize, outputs: usize) -> Vec<u32> {
    let mut out = vec![0u32; inputs];
    for slot in out.iter_mut().rev() {
        *slot = (index % outputs as u128) as u32;
        index /= outputs as u128;
    }
    out
}

impl Iterator for FunctionIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.next >= self.end {
            return None;
        }
        let f = decode_function(self.next, self.inputs, self.outputs);
        self.next += 1;
        Some(f)
    }
}

/// Every strategy pair for the given alphabets, each exactly once, without
/// materializing the set. `range` restricts to a slice of the index space
/// so scans can be partitioned.
#[derive(Clone, Debug)]
pub struct StrategyIter {
    dims: Dims,
    bob_count: u128,
    next: u128,
    end: u128,
}

impl StrategyIter {
    pub fn new(dims: Dims, budget: u128) -> Result<Self, StrategyError> {
        let alice = function_count(dims.inputs[0], dims.outputs[0]);
        let bob = function_count(dims.inputs[1], dims.outputs[1]);
        let count = alice.saturating_mul(bob);
        if count > budget {
            return Err(StrategyError::BudgetExceeded { count, budget });
        }
        Ok(StrategyIter { dims, bob_count: bob, next: 0, end: count })
    }

    pub fn total(&self) -> u128 {
        self.end
    }

    pub fn range(mut self, start: u128, end: u128) -> Self {
        self.end = end.min(self.end);
        self.next = start.min(self.end);
        self
    }
}

impl Iterator for StrategyIter {
    type Item = LocalDetStrategy;

    fn next(&mut self) -> Option<LocalDetStrategy> {
        if self.next >= self.end {
            return None;
        }
        let (fi, gi) = (self.next / self.bob_count, self.next % self.bob_count);
        self.next += 1;
        let d = self.dims;
        Some(LocalDetStrategy {
            f: decode_function(fi, d.inputs[0], d.outputs[0]),
            g: decode_function(gi, d.inputs[1], d.outputs[1]),
            dims: d,
        })
    }
}

/// Strategies for `n` binary boxes. For one side, the other party's
/// function is fixed to the constant zero.
pub fn enumerate(n: u32, side: Side, budget: u128) -> Result<Box<dyn Iterator<Item = LocalDetStrategy>>, StrategyError> {
    let dims = Dims::binary(n);
    let size = 1usize << n;
    match side {
        Side::Both => Ok(Box::new(StrategyIter::new(dims, budget)?)),
        Side::Alice => Ok(Box::new(
            FunctionIter::new(size, size).map(move |f| LocalDetStrategy::new_unchecked(dims, f, vec![0; size])),
        )),
        Side::Bob => Ok(Box::new(
            FunctionIter::new(size, size).map(move |g| LocalDetStrategy::new_unchecked(dims, vec![0; size], g)),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Var;

    fn s(text: &str) -> LocalDetStrategy {
        LocalDetStrategy::parse_binary(text).unwrap()
    }

    #[test]
    fn text_round_trip_and_errors() {
        let d = s("[0 0 0 1; 0 0 2 0]");
        assert_eq!(d.to_string(), "[0 0 0 1; 0 0 2 0]");
        assert_eq!(d.dims(), Dims::binary(2));
        assert!(LocalDetStrategy::parse_binary("[0 0 0 4; 0 0 0 0]").is_err());
        assert!(LocalDetStrategy::parse_binary("0 0; 0 0").is_err());
        assert!(LocalDetStrategy::parse_binary("[0 0 0; 0 0 0]").is_err());
    }

    #[test]
    fn pl_point_as_box() {
        let b = BoxTable::deterministic(&s("[0 0 0 1; 0 0 2 0]"));
        // X at u = 11 is 01; Y at v = 10 is 10.
        assert_eq!(b.get(0b01, 0b10, 0b11, 0b10), &Scalar::one());
        assert!(b.is_nonsignalling());
        assert_eq!(b.mass(), &Scalar::one());
    }

    #[test]
    fn constant_zero_box() {
        let b = BoxTable::deterministic(&s("[0 0; 0 0]"));
        for u in 0..2 {
            for v in 0..2 {
                assert_eq!(b.get(0, 0, u, v), &Scalar::one());
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate(1, Side::Both, DEFAULT_BUDGET).unwrap().count(), 16);
        assert_eq!(strategy_count(2, Side::Both), 65_536);
        assert_eq!(StrategyIter::new(Dims::binary(2), DEFAULT_BUDGET).unwrap().total(), 65_536);
        assert_eq!(strategy_count(3, Side::Alice), 16_777_216);
        assert_eq!(FunctionIter::new(8, 8).len(), 16_777_216);
        assert!(matches!(
            StrategyIter::new(Dims::binary(3), DEFAULT_BUDGET),
            Err(StrategyError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn enumeration_visits_each_strategy_once() {
        let all: Vec<_> = StrategyIter::new(Dims::binary(1), DEFAULT_BUDGET).unwrap().collect();
        let mut codes: Vec<_> = all.iter().map(LocalDetStrategy::code).collect();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), 16);
        let split: Vec<_> = StrategyIter::new(Dims::binary(1), DEFAULT_BUDGET)
            .unwrap()
            .range(0, 7)
            .chain(StrategyIter::new(Dims::binary(1), DEFAULT_BUDGET).unwrap().range(7, 16))
            .collect();
        assert_eq!(split, all);
    }

    #[test]
    fn products() {
        let zero1 = s("[0 0; 0 0]");
        assert_eq!(zero1.product(&zero1), s("[0 0 0 0; 0 0 0 0]"));
        let a = s("[0 1; 1 0]");
        let b = s("[1 1; 0 1]");
        let p = a.product(&b);
        assert!(p.is_product(1));
        assert_eq!(p.rounds_lost(0b11, 0b01), a.rounds_lost(1, 0) + b.rounds_lost(1, 1));
        assert!(!s("[0 0 0 1; 0 0 2 0]").is_product(1));
    }

    #[test]
    fn round_losses() {
        // Lemma-3 base strategy never loses both rounds.
        let base = s("[0 0 0 1; 0 0 2 0]");
        assert_eq!(base.worst_input().2, 1);
        // Constant zero wins (0, 0) and loses (1, 1).
        let zero = s("[0 0; 0 0]");
        assert_eq!(zero.rounds_lost(0, 0), 0);
        assert_eq!(zero.worst_input(), (1, 1, 1));
    }

    #[test]
    fn biased_feasibility() {
        for t in ["[0 0; 0 1]", "[0 1; 1 0]", "[1 0; 1 1]"] {
            assert!(s(t).biased_feasible(), "{t}");
        }
        // x(1) = y(1)
        assert!(!s("[0 0; 0 0]").biased_feasible());
        // constant (x, y) = (1, 0)
        assert!(!s("[1 1; 0 0]").biased_feasible());
    }

    #[test]
    fn max_weight_examples() {
        let eps = Scalar::var(Var::Eps);
        // Against the perfect PR box any strategy hits an empty cell.
        let zero = s("[0 0; 0 0]");
        assert_eq!(max_weight(&zero, &BoxTable::pr(1)).unwrap().value, Scalar::zero());
        let iso = BoxTable::isotropic(1, &eps).unwrap();
        let w = max_weight(&zero, &iso).unwrap();
        assert_eq!(w.value, &Scalar::frac(1, 2) * &eps);
        assert_eq!(w.cell, (0, 0, 1, 1));
        assert_eq!(w.probe, Some(default_probe()));
        let delta = Scalar::var(Var::Delta);
        let biased = BoxTable::biased(1, &delta).unwrap();
        assert_eq!(max_weight(&zero, &biased).unwrap().value, Scalar::zero());
        assert_eq!(max_weight(&s("[0 0; 0 1]"), &biased).unwrap().value, delta);
    }
}
