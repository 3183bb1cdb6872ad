//! Bipartite conditional distributions with exact entries.
//!
//! A [`BoxTable`] stores `P(x, y | u, v)` for Alice's output `x`, Bob's
//! output `y`, Alice's input `u` and Bob's input `v`, flattened in exactly
//! that argument order. For `n` parallel binary boxes every alphabet has
//! `2^n` letters and a letter is a bit string in which **box 1 is the most
//! significant bit**: input `u = 0b10` for two boxes means `u_1 = 1`,
//! `u_2 = 0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numeric::{NumericError, Rational, Scalar, ScalarRepr, Var};
use crate::strategies::LocalDetStrategy;

/// Alphabet sizes of a bipartite box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dims {
    /// `[|U|, |V|]`
    pub inputs: [usize; 2],
    /// `[|X|, |Y|]`
    pub outputs: [usize; 2],
}

impl Dims {
    pub fn new(inputs: [usize; 2], outputs: [usize; 2]) -> Self {
        Dims { inputs, outputs }
    }

    /// `n` binary boxes: every alphabet has `2^n` letters.
    pub fn binary(n: u32) -> Self {
        let s = 1usize << n;
        Dims { inputs: [s, s], outputs: [s, s] }
    }

    /// Number of parallel binary boxes, if the alphabets have that shape.
    pub fn rounds(&self) -> Option<u32> {
        let s = self.inputs[0];
        let uniform = self.inputs[1] == s && self.outputs == [s, s];
        (uniform && s.is_power_of_two()).then(|| s.trailing_zeros())
    }

    pub fn cells(&self) -> usize {
        self.inputs[0] * self.inputs[1] * self.outputs[0] * self.outputs[1]
    }

    pub fn input_pairs(&self) -> usize {
        self.inputs[0] * self.inputs[1]
    }

    #[inline]
    pub fn cell_index(&self, x: usize, y: usize, u: usize, v: usize) -> usize {
        ((x * self.outputs[1] + y) * self.inputs[0] + u) * self.inputs[1] + v
    }

    pub fn cell_coords(&self, idx: usize) -> (usize, usize, usize, usize) {
        let v = idx % self.inputs[1];
        let rest = idx / self.inputs[1];
        let u = rest % self.inputs[0];
        let rest = rest / self.inputs[0];
        let y = rest % self.outputs[1];
        let x = rest / self.outputs[1];
        (x, y, u, v)
    }

    pub fn tensor(&self, other: &Dims) -> Dims {
        Dims {
            inputs: [self.inputs[0] * other.inputs[0], self.inputs[1] * other.inputs[1]],
            outputs: [self.outputs[0] * other.outputs[0], self.outputs[1] * other.outputs[1]],
        }
    }
}

/// An `n`-bit string; bit `0` (the first box) is the most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    value: u32,
    width: u32,
}

impl BitString {
    pub fn new(value: u32, width: u32) -> Option<Self> {
        (width < 32 && value < (1 << width)).then_some(BitString { value, width })
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Bit belonging to box `round` (0-based, box 1 first).
    pub fn bit(&self, round: u32) -> bool {
        (self.value >> (self.width - 1 - round)) & 1 == 1
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let value = bits.iter().fold(0, |acc, &b| (acc << 1) | b as u32);
        BitString { value, width: bits.len() as u32 }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.width {
            write!(f, "{}", self.bit(r) as u8)?;
        }
        Ok(())
    }
}

/// Whether out-of-range noise parameters are rejected or only logged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RangeCheck {
    #[default]
    Enforce,
    Warn,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoxError {
    #[error("parameter {name} = {value} outside the admissible range [{lo}, {hi}] (override to explore)")]
    ParamOutOfRange { name: &'static str, value: Rational, lo: Rational, hi: Rational },
    #[error("table has {got} entries, dims require {expected}")]
    Shape { expected: usize, got: usize },
    #[error("input pair (u={u}, v={v}) has total mass {got}, expected {expected}")]
    NotNormalized { u: usize, v: usize, got: Scalar, expected: Scalar },
    #[error("negative entry {value} at cell (x={x}, y={y}, u={u}, v={v})")]
    NegativeEntry { x: usize, y: usize, u: usize, v: usize, value: Scalar },
    #[error("alphabet mismatch: {0:?} vs {1:?}")]
    AlphabetMismatch(Dims, Dims),
    #[error("weights and parts differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("negative mixing weight {0}")]
    NegativeWeight(Scalar),
    #[error("weighted part exceeds the box at cell (x={x}, y={y}, u={u}, v={v}): {needed} > {available}")]
    ComponentTooLarge { x: usize, y: usize, u: usize, v: usize, needed: Scalar, available: Scalar },
    #[error("nothing remains after subtracting the component")]
    EmptyRemainder,
    #[error("alphabets are not n-bit strings: {0:?}")]
    NotBinary(Dims),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("malformed box JSON: {0}")]
    Json(String),
}

/// Where a marginal depends on the other party's input.
#[derive(Debug, Clone, PartialEq)]
pub enum SignallingViolation {
    /// Bob's marginal `P(y|u,v)` differs between `u` and `u_other`.
    AliceToBob { y: usize, v: usize, u: usize, u_other: usize, lhs: Scalar, rhs: Scalar },
    /// Alice's marginal `P(x|u,v)` differs between `v` and `v_other`.
    BobToAlice { x: usize, u: usize, v: usize, v_other: usize, lhs: Scalar, rhs: Scalar },
}

impl fmt::Display for SignallingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignallingViolation::AliceToBob { y, v, u, u_other, lhs, rhs } => write!(
                f,
                "Bob's marginal P(y={y}|u,v={v}) is {lhs} at u={u} but {rhs} at u={u_other}"
            ),
            SignallingViolation::BobToAlice { x, u, v, v_other, lhs, rhs } => write!(
                f,
                "Alice's marginal P(x={x}|u={u},v) is {lhs} at v={v} but {rhs} at v={v_other}"
            ),
        }
    }
}

/// CHSH statistics of a box built from binary rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshProfile {
    pub rounds: u32,
    /// Probability of winning every round, indexed by `u * 2^n + v`.
    pub all_rounds: Vec<Scalar>,
    /// Probability of winning round `i`, indexed `[u * 2^n + v][i]`.
    pub per_round: Vec<Vec<Scalar>>,
}

impl ChshProfile {
    pub fn all_rounds_at(&self, u: usize, v: usize) -> &Scalar {
        &self.all_rounds[u * (1 << self.rounds) + v]
    }
}

/// Number of rounds `i` with `x_i ⊕ y_i ≠ u_i · v_i`.
#[inline]
pub fn rounds_lost_at(x: usize, y: usize, u: usize, v: usize) -> u32 {
    ((x ^ y) ^ (u & v)).count_ones()
}

/// A bipartite conditional distribution (or unnormalized sum of them) with
/// exact [`Scalar`] entries and explicit total mass per input pair.
#[derive(Clone, PartialEq)]
pub struct BoxTable {
    dims: Dims,
    table: Vec<Scalar>,
    mass: Scalar,
}

impl BoxTable {
    /// Validating constructor: checks shape, nonnegativity (symbolically over
    /// the admissible interval for polynomial entries) and that every input
    /// pair carries the same mass.
    pub fn new(dims: Dims, table: Vec<Scalar>) -> Result<Self, BoxError> {
        if table.len() != dims.cells() {
            return Err(BoxError::Shape { expected: dims.cells(), got: table.len() });
        }
        for (idx, value) in table.iter().enumerate() {
            if !value.is_nonneg() {
                let (x, y, u, v) = dims.cell_coords(idx);
                return Err(BoxError::NegativeEntry { x, y, u, v, value: value.clone() });
            }
        }
        let b = BoxTable::unchecked(dims, table);
        b.check_normalization()?;
        Ok(b)
    }

    /// Builds the table from a cell function; mass is read off input pair
    /// `(0, 0)`. No validation.
    pub(crate) fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize, usize) -> Scalar) -> Self {
        let table = (0..dims.cells())
            .map(|idx| {
                let (x, y, u, v) = dims.cell_coords(idx);
                f(x, y, u, v)
            })
            .collect();
        BoxTable::unchecked(dims, table)
    }

    pub(crate) fn unchecked(dims: Dims, table: Vec<Scalar>) -> Self {
        let mut b = BoxTable { dims, table, mass: Scalar::zero() };
        b.mass = b.input_mass(0, 0);
        b
    }

    fn input_mass(&self, u: usize, v: usize) -> Scalar {
        let mut acc = Scalar::zero();
        for x in 0..self.dims.outputs[0] {
            for y in 0..self.dims.outputs[1] {
                acc = &acc + self.get(x, y, u, v);
            }
        }
        acc
    }

    pub fn check_normalization(&self) -> Result<(), BoxError> {
        for u in 0..self.dims.inputs[0] {
            for v in 0..self.dims.inputs[1] {
                let got = self.input_mass(u, v);
                if got != self.mass {
                    return Err(BoxError::NotNormalized { u, v, got, expected: self.mass.clone() });
                }
            }
        }
        Ok(())
    }

    /// The trivial box with one letter per alphabet and entry 1.
    pub fn trivial() -> Self {
        BoxTable::unchecked(Dims::new([1, 1], [1, 1]), vec![Scalar::one()])
    }

    /// `n` perfect PR boxes: `1/2^n` on cells winning every round.
    pub fn pr(n: u32) -> Self {
        let weight = Scalar::Rat(Rational::one() / Rational::from_int(1 << n));
        BoxTable::from_fn(Dims::binary(n), |x, y, u, v| {
            if rounds_lost_at(x, y, u, v) == 0 {
                weight.clone()
            } else {
                Scalar::zero()
            }
        })
    }

    /// Uniform box: every entry `1/4^n`.
    pub fn uniform(n: u32) -> Self {
        let weight = Scalar::Rat(Rational::one() / Rational::from_int(1 << (2 * n)));
        BoxTable::from_fn(Dims::binary(n), |_, _, _, _| weight.clone())
    }

    /// `n` independent isotropic noisy PR boxes; a cell losing `i` rounds
    /// has entry `(ε/2)^i (1/2 − ε/2)^(n−i)`.
    pub fn isotropic(n: u32, eps: &Scalar) -> Result<Self, BoxError> {
        BoxTable::isotropic_with(n, eps, RangeCheck::Enforce)
    }

    pub fn isotropic_with(n: u32, eps: &Scalar, check: RangeCheck) -> Result<Self, BoxError> {
        check_range("eps", eps, Var::Eps, check)?;
        let half = Scalar::frac(1, 2);
        let lose = &half * eps;
        let win = &half - &lose;
        let values: Vec<Scalar> = (0..=n).map(|i| &lose.pow(i) * &win.pow(n - i)).collect();
        Ok(BoxTable::from_fn(Dims::binary(n), |x, y, u, v| {
            values[rounds_lost_at(x, y, u, v) as usize].clone()
        }))
    }

    /// `n` independent maximally biased noisy PR boxes.
    pub fn biased(n: u32, delta: &Scalar) -> Result<Self, BoxError> {
        BoxTable::biased_with(n, delta, RangeCheck::Enforce)
    }

    pub fn biased_with(n: u32, delta: &Scalar, check: RangeCheck) -> Result<Self, BoxError> {
        check_range("delta", delta, Var::Delta, check)?;
        let single = biased_single(delta);
        let mut acc = BoxTable::trivial();
        for _ in 0..n {
            acc = acc.tensor(&single);
        }
        Ok(acc)
    }

    /// The 0/1 table of a local deterministic strategy.
    pub fn deterministic(s: &LocalDetStrategy) -> Self {
        BoxTable::from_fn(s.dims(), |x, y, u, v| {
            if s.f()[u] as usize == x && s.g()[v] as usize == y {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn mass(&self) -> &Scalar {
        &self.mass
    }

    pub fn table(&self) -> &[Scalar] {
        &self.table
    }

    pub fn get(&self, x: usize, y: usize, u: usize, v: usize) -> &Scalar {
        &self.table[self.dims.cell_index(x, y, u, v)]
    }

    pub fn variable(&self) -> Option<Var> {
        self.table.iter().find_map(Scalar::variable).or(self.mass.variable())
    }

    pub fn is_symbolic(&self) -> bool {
        self.variable().is_some()
    }

    /// Substitutes a value for the noise parameter.
    pub fn evaluate(&self, x: &Rational) -> BoxTable {
        BoxTable {
            dims: self.dims,
            table: self.table.iter().map(|s| Scalar::Rat(s.eval(x))).collect(),
            mass: Scalar::Rat(self.mass.eval(x)),
        }
    }

    /// Entries as rationals, if none is symbolic.
    pub fn rationals(&self) -> Option<Vec<Rational>> {
        self.table.iter().map(|s| s.as_rational().cloned()).collect()
    }

    pub fn is_nonsignalling(&self) -> bool {
        self.signalling_violation().is_none()
    }

    /// First failing marginal condition, if any (compared coefficientwise for
    /// polynomial entries).
    pub fn signalling_violation(&self) -> Option<SignallingViolation> {
        let d = self.dims;
        // Bob's marginal must not depend on u.
        for v in 0..d.inputs[1] {
            for y in 0..d.outputs[1] {
                let marginal = |u: usize| (0..d.outputs[0]).map(|x| self.get(x, y, u, v).clone()).sum::<Scalar>();
                let reference = marginal(0);
                for u in 1..d.inputs[0] {
                    let m = marginal(u);
                    if m != reference {
                        return Some(SignallingViolation::AliceToBob { y, v, u: 0, u_other: u, lhs: reference, rhs: m });
                    }
                }
            }
        }
        for u in 0..d.inputs[0] {
            for x in 0..d.outputs[0] {
                let marginal = |v: usize| (0..d.outputs[1]).map(|y| self.get(x, y, u, v).clone()).sum::<Scalar>();
                let reference = marginal(0);
                for v in 1..d.inputs[1] {
                    let m = marginal(v);
                    if m != reference {
                        return Some(SignallingViolation::BobToAlice { x, u, v: 0, v_other: v, lhs: reference, rhs: m });
                    }
                }
            }
        }
        None
    }

    /// Product box over concatenated alphabets; `self` supplies the most
    /// significant part of every letter.
    pub fn tensor(&self, other: &BoxTable) -> BoxTable {
        let (a, b) = (self.dims, other.dims);
        BoxTable::from_fn(a.tensor(&b), |x, y, u, v| {
            let (xa, xb) = (x / b.outputs[0], x % b.outputs[0]);
            let (ya, yb) = (y / b.outputs[1], y % b.outputs[1]);
            let (ua, ub) = (u / b.inputs[0], u % b.inputs[0]);
            let (va, vb) = (v / b.inputs[1], v % b.inputs[1]);
            self.get(xa, ya, ua, va) * other.get(xb, yb, ub, vb)
        })
    }

    pub fn tensor_power(&self, n: u32) -> BoxTable {
        (0..n).fold(BoxTable::trivial(), |acc, _| acc.tensor(self))
    }

    pub fn scale(&self, w: &Scalar) -> BoxTable {
        BoxTable {
            dims: self.dims,
            table: self.table.iter().map(|s| s * w).collect(),
            mass: &self.mass * w,
        }
    }

    /// Entrywise sum; masses add.
    pub fn add(&self, other: &BoxTable) -> Result<BoxTable, BoxError> {
        if self.dims != other.dims {
            return Err(BoxError::AlphabetMismatch(self.dims, other.dims));
        }
        Ok(BoxTable {
            dims: self.dims,
            table: self.table.iter().zip(&other.table).map(|(a, b)| a + b).collect(),
            mass: &self.mass + &other.mass,
        })
    }

    /// `Σ w_i · parts_i` with nonnegative weights.
    pub fn mix(weights: &[Scalar], parts: &[BoxTable]) -> Result<BoxTable, BoxError> {
        if weights.len() != parts.len() {
            return Err(BoxError::LengthMismatch(weights.len(), parts.len()));
        }
        let Some(first) = parts.first() else {
            return Ok(BoxTable::trivial().scale(&Scalar::zero()));
        };
        let dims = first.dims;
        let mut table = vec![Scalar::zero(); dims.cells()];
        let mut mass = Scalar::zero();
        for (w, p) in weights.iter().zip(parts) {
            if !w.is_nonneg() {
                return Err(BoxError::NegativeWeight(w.clone()));
            }
            if p.dims != dims {
                return Err(BoxError::AlphabetMismatch(dims, p.dims));
            }
            if w.is_zero() {
                continue;
            }
            for (t, e) in table.iter_mut().zip(&p.table) {
                if !e.is_zero() {
                    *t = &*t + &(w * e);
                }
            }
            mass = &mass + &(w * &p.mass);
        }
        Ok(BoxTable { dims, table, mass })
    }

    /// Removes `weight · part` and renormalizes the remainder to mass 1.
    ///
    /// Succeeds iff `weight · part ≤ self` holds in every cell (over the
    /// whole admissible interval for symbolic entries); otherwise reports the
    /// first offending cell.
    pub fn subtract_component(&self, weight: &Scalar, part: &BoxTable) -> Result<BoxTable, BoxError> {
        if self.dims != part.dims {
            return Err(BoxError::AlphabetMismatch(self.dims, part.dims));
        }
        let mut table = Vec::with_capacity(self.table.len());
        for (idx, (have, p)) in self.table.iter().zip(&part.table).enumerate() {
            let needed = weight * p;
            let rest = have - &needed;
            if !rest.is_nonneg() {
                let (x, y, u, v) = self.dims.cell_coords(idx);
                return Err(BoxError::ComponentTooLarge { x, y, u, v, needed, available: have.clone() });
            }
            table.push(rest);
        }
        let rest_mass = &self.mass - &(weight * &part.mass);
        if rest_mass.is_zero() {
            return Err(BoxError::EmptyRemainder);
        }
        let table = table
            .iter()
            .map(|e| e.div_exact(&rest_mass))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BoxTable { dims: self.dims, table, mass: Scalar::one() })
    }

    /// Per-input-pair CHSH win probabilities for a box of binary rounds.
    pub fn chsh_profile(&self) -> Result<ChshProfile, BoxError> {
        let n = self.dims.rounds().ok_or(BoxError::NotBinary(self.dims))?;
        let size = 1usize << n;
        let mut all_rounds = Vec::with_capacity(size * size);
        let mut per_round = Vec::with_capacity(size * size);
        for u in 0..size {
            for v in 0..size {
                let mut all = Scalar::zero();
                let mut rounds = vec![Scalar::zero(); n as usize];
                for x in 0..size {
                    for y in 0..size {
                        let p = self.get(x, y, u, v);
                        if p.is_zero() {
                            continue;
                        }
                        let lost = (x ^ y) ^ (u & v);
                        if lost == 0 {
                            all = &all + p;
                        }
                        for (i, acc) in rounds.iter_mut().enumerate() {
                            if lost >> (n as usize - 1 - i) & 1 == 0 {
                                *acc = &*acc + p;
                            }
                        }
                    }
                }
                all_rounds.push(all);
                per_round.push(rounds);
            }
        }
        Ok(ChshProfile { rounds: n, all_rounds, per_round })
    }

    /// Probability of losing exactly `i` rounds under uniformly random
    /// inputs, for `i = 0..=n`.
    pub fn rounds_lost_mass(&self) -> Result<Vec<Scalar>, BoxError> {
        let n = self.dims.rounds().ok_or(BoxError::NotBinary(self.dims))?;
        let mut hist = vec![Scalar::zero(); n as usize + 1];
        for (idx, p) in self.table.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let (x, y, u, v) = self.dims.cell_coords(idx);
            let i = rounds_lost_at(x, y, u, v) as usize;
            hist[i] = &hist[i] + p;
        }
        let pairs = Scalar::Rat(Rational::one() / Rational::from_int(self.dims.input_pairs() as i64));
        Ok(hist.iter().map(|h| h * &pairs).collect())
    }

    pub fn to_json(&self) -> BoxJson {
        let d = self.dims;
        let table = (0..d.outputs[0])
            .map(|x| {
                (0..d.outputs[1])
                    .map(|y| {
                        (0..d.inputs[0])
                            .map(|u| (0..d.inputs[1]).map(|v| ScalarRepr::from_scalar(self.get(x, y, u, v))).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        BoxJson {
            schema: BOX_SCHEMA.to_string(),
            inputs: d.inputs,
            outputs: d.outputs,
            variable: self.variable(),
            mass: ScalarRepr::from_scalar(&self.mass),
            table,
        }
    }

    pub fn from_json(json: BoxJson) -> Result<BoxTable, BoxError> {
        if json.schema != BOX_SCHEMA {
            return Err(BoxError::Json(format!("unsupported schema {:?}", json.schema)));
        }
        let dims = Dims::new(json.inputs, json.outputs);
        let var = json.variable.unwrap_or(Var::Eps);
        let mut table = Vec::with_capacity(dims.cells());
        let shape_err = || BoxError::Json("table nesting does not match inputs/outputs".into());
        if json.table.len() != dims.outputs[0] {
            return Err(shape_err());
        }
        for xs in json.table {
            if xs.len() != dims.outputs[1] {
                return Err(shape_err());
            }
            for ys in xs {
                if ys.len() != dims.inputs[0] {
                    return Err(shape_err());
                }
                for us in ys {
                    if us.len() != dims.inputs[1] {
                        return Err(shape_err());
                    }
                    table.extend(us.into_iter().map(|s| s.into_scalar(var)));
                }
            }
        }
        let b = BoxTable::new(dims, table)?;
        let mass = json.mass.into_scalar(var);
        if b.mass != mass {
            return Err(BoxError::NotNormalized { u: 0, v: 0, got: b.mass, expected: mass });
        }
        Ok(b)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("box JSON serializes")
    }

    pub fn from_json_str(s: &str) -> Result<BoxTable, BoxError> {
        let json: BoxJson = serde_json::from_str(s).map_err(|e| BoxError::Json(e.to_string()))?;
        BoxTable::from_json(json)
    }
}

impl fmt::Debug for BoxTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoxTable").field("dims", &self.dims).field("mass", &self.mass).finish_non_exhaustive()
    }
}

pub const BOX_SCHEMA: &str = "prbox/box/v1";

/// On-disk box format. `table[x][y][u][v]`; letters are bit strings with
/// box 1 as the most significant bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxJson {
    pub schema: String,
    pub inputs: [usize; 2],
    pub outputs: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<Var>,
    pub mass: ScalarRepr,
    pub table: Vec<Vec<Vec<Vec<ScalarRepr>>>>,
}

fn check_range(name: &'static str, param: &Scalar, var: Var, check: RangeCheck) -> Result<(), BoxError> {
    let Some(value) = param.as_rational() else {
        return Ok(());
    };
    let (lo, hi) = var.admissible();
    if value < &lo || value > &hi {
        let err = BoxError::ParamOutOfRange { name, value: value.clone(), lo, hi };
        match check {
            RangeCheck::Enforce => return Err(err),
            RangeCheck::Warn => log::warn!("{err}"),
        }
    }
    Ok(())
}

/// One maximally biased box: wins `(u,v) = (1,1)` perfectly, loses the other
/// three input pairs only through `(x,y) = (0,1)` with probability δ.
fn biased_single(delta: &Scalar) -> BoxTable {
    let half = Scalar::frac(1, 2);
    let half_delta = &half * delta;
    let low = &half - &half_delta;
    let high = &half + &half_delta;
    BoxTable::from_fn(Dims::binary(1), |x, y, u, v| {
        match ((u, v) == (1, 1), x, y) {
            (false, 0, 0) | (false, 1, 1) => low.clone(),
            (false, 0, 1) => delta.clone(),
            (false, 1, 0) => Scalar::zero(),
            (true, 1, 0) => low.clone(),
            (true, 0, 1) => high.clone(),
            _ => Scalar::zero(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps() -> Scalar {
        Scalar::var(Var::Eps)
    }

    fn delta() -> Scalar {
        Scalar::var(Var::Delta)
    }

    #[test]
    fn perfect_pr_box() {
        let b = BoxTable::isotropic(1, &Scalar::zero()).unwrap();
        for idx in 0..16 {
            let (x, y, u, v) = b.dims().cell_coords(idx);
            let expected = if (x ^ y) == (u & v) { Scalar::frac(1, 2) } else { Scalar::zero() };
            assert_eq!(b.get(x, y, u, v), &expected);
        }
        assert_eq!(b, BoxTable::pr(1));
    }

    #[test]
    fn isotropic_half_is_uniform_with_override() {
        let half = Scalar::frac(1, 2);
        assert!(matches!(BoxTable::isotropic(1, &half), Err(BoxError::ParamOutOfRange { .. })));
        let b = BoxTable::isotropic_with(1, &half, RangeCheck::Warn).unwrap();
        assert!(b.table().iter().all(|e| e == &Scalar::frac(1, 4)));
        assert_eq!(b, BoxTable::uniform(1));
    }

    #[test]
    fn isotropic_two_rounds_symbolic() {
        let b = BoxTable::isotropic(2, &eps()).unwrap();
        // x = 11, y = 00, u = v = 00 loses both rounds.
        let both_lost = b.get(0b11, 0b00, 0b00, 0b00);
        let expected = &(&eps() * &eps()) * &Scalar::frac(1, 4);
        assert_eq!(both_lost, &expected);
        assert_eq!(b.mass(), &Scalar::one());
        assert!(b.is_nonsignalling());
        assert_eq!(b, BoxTable::isotropic(1, &eps()).unwrap().tensor_power(2));
    }

    #[test]
    fn biased_entries_follow_the_table() {
        let b = BoxTable::biased(1, &delta()).unwrap();
        assert_eq!(b.get(0, 1, 0, 0), &delta());
        let high = &Scalar::frac(1, 2) + &(&Scalar::frac(1, 2) * &delta());
        // The (u,v) = (1,1) column is won perfectly: the large entry sits at
        // (x,y) = (0,1) and (0,0) is empty.
        assert_eq!(b.get(0, 1, 1, 1), &high);
        assert_eq!(b.get(0, 0, 1, 1), &Scalar::zero());
        assert_eq!(BoxTable::biased(1, &Scalar::zero()).unwrap(), BoxTable::pr(1));
        assert!(b.is_nonsignalling());
        assert!(BoxTable::biased(1, &Scalar::frac(1, 2)).is_err());
        assert!(BoxTable::biased_with(1, &Scalar::frac(1, 2), RangeCheck::Warn).is_ok());
    }

    #[test]
    fn signalling_table_is_detected() {
        // Alice outputs Bob's input.
        let b = BoxTable::from_fn(Dims::binary(1), |x, y, _u, v| {
            if x == v && y == 0 {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        });
        assert!(matches!(b.signalling_violation(), Some(SignallingViolation::BobToAlice { .. })));
    }

    #[test]
    fn s21_sum_is_nonsignalling_with_mass_two() {
        let p0 = BoxTable::pr(1);
        let quarter = BoxTable::isotropic(1, &Scalar::frac(1, 4)).unwrap();
        let s = p0.tensor(&quarter).add(&quarter.tensor(&p0)).unwrap();
        assert_eq!(s.mass(), &Scalar::frac(2, 1));
        assert!(s.is_nonsignalling());
        s.check_normalization().unwrap();
    }

    #[test]
    fn mixture_of_pr_and_noise() {
        let e = eps();
        let two_e = &Scalar::frac(2, 1) * &e;
        let m = BoxTable::mix(&[two_e.clone(), &Scalar::one() - &two_e], &[BoxTable::uniform(1), BoxTable::pr(1)]).unwrap();
        assert_eq!(m, BoxTable::isotropic(1, &e).unwrap());
    }

    #[test]
    fn tensor_with_uniform_scales_entries() {
        let pr = BoxTable::pr(1);
        let t = pr.tensor(&BoxTable::uniform(1));
        assert_eq!(t.dims(), Dims::binary(2));
        assert_eq!(t.get(0, 0, 0b00, 0b00), &Scalar::frac(1, 8));
        assert_eq!(t.get(0b10, 0, 0b00, 0b00), &Scalar::zero());
    }

    #[test]
    fn subtract_zero_weight_is_identity() {
        let b = BoxTable::isotropic(1, &Scalar::frac(1, 10)).unwrap();
        let r = b.subtract_component(&Scalar::zero(), &BoxTable::uniform(1)).unwrap();
        assert_eq!(r, b);
    }

    #[test]
    fn chsh_profiles() {
        let e = eps();
        let iso = BoxTable::isotropic(1, &e).unwrap().chsh_profile().unwrap();
        let win = &Scalar::one() - &e;
        assert!(iso.all_rounds.iter().all(|p| p == &win));

        let biased = BoxTable::biased(1, &delta()).unwrap().chsh_profile().unwrap();
        assert_eq!(biased.all_rounds_at(1, 1), &Scalar::one());

        let hist = BoxTable::pr(3).rounds_lost_mass().unwrap();
        assert_eq!(hist, vec![Scalar::one(), Scalar::zero(), Scalar::zero(), Scalar::zero()]);
        assert!(BoxTable::trivial().tensor(&BoxTable::from_fn(Dims::new([3, 1], [1, 1]), |_, _, _, _| Scalar::one())).chsh_profile().is_err());
    }

    #[test]
    fn bitstrings_use_msb_first() {
        let b = BitString::new(0b10, 2).unwrap();
        assert!(b.bit(0));
        assert!(!b.bit(1));
        assert_eq!(b.to_string(), "10");
        assert_eq!(BitString::from_bits(&[true, false]), b);
        assert!(BitString::new(4, 2).is_none());
    }

    #[test]
    fn zero_boxes_is_trivial() {
        let b = BoxTable::isotropic(0, &eps()).unwrap();
        assert_eq!(b, BoxTable::trivial());
        assert_eq!(b.mass(), &Scalar::one());
    }

    #[test]
    fn json_round_trip_symbolic_and_rational() {
        for b in [
            BoxTable::isotropic(2, &eps()).unwrap(),
            BoxTable::biased(1, &delta()).unwrap(),
            BoxTable::isotropic(1, &Scalar::frac(1, 8)).unwrap(),
        ] {
            let s = b.to_json_string();
            assert_eq!(BoxTable::from_json_str(&s).unwrap(), b);
        }
    }

    #[test]
    fn json_rejects_bad_input() {
        let mut json = BoxTable::pr(1).to_json();
        json.table[0][0][0][0] = ScalarRepr::Rat(Rational::frac(3, 4));
        assert!(matches!(BoxTable::from_json(json), Err(BoxError::NotNormalized { .. })));
        assert!(BoxTable::from_json_str("{\"schema\":\"nope\"}").is_err());
    }
}
