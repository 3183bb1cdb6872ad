//! Revised primal simplex over exact rationals for
//! `max cᵀx  s.t.  Ax ≤ b, x ≥ 0` with `b ≥ 0`, started from the slack basis.
//!
//! The basis inverse is stored densely. Pricing uses Dantzig's rule on
//! integer-scaled duals and falls back to Bland's rule after a run of
//! degenerate pivots; Bland's rule stays on until the objective strictly
//! improves, which rules out cycling.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::numeric::Rational;

use super::float::FloatSimplex;
use super::LpError;

/// Degenerate pivots in a row before switching to Bland's rule.
const DEGENERATE_RUN: usize = 30;

/// A sparse constraint column with small integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Column {
    /// `(row, coefficient)`, rows strictly increasing, coefficients nonzero.
    pub entries: Vec<(usize, i64)>,
    pub cost: Rational,
}

impl Column {
    pub fn new(mut entries: Vec<(usize, i64)>, cost: Rational) -> Self {
        entries.sort_unstable();
        let mut merged: Vec<(usize, i64)> = Vec::with_capacity(entries.len());
        for (r, a) in entries {
            match merged.last_mut() {
                Some((lr, la)) if *lr == r => *la += a,
                _ => merged.push((r, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0);
        Column { entries: merged, cost }
    }
}

/// An explicit LP in inequality form.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub rhs: Vec<Rational>,
    pub columns: Vec<Column>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    /// One value per column.
    pub primal: Vec<Rational>,
    /// One value per row; feasible for `Aᵀy ≥ c, y ≥ 0` at optimality.
    pub dual: Vec<Rational>,
    pub objective: Rational,
    pub pivots: usize,
    /// Largest reduced cost `c_j − yᵀa_j` over the columns (≤ 0 at optimum;
    /// `None` when there are no columns).
    pub max_reduced_cost: Option<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum VarId {
    Col(usize),
    Slack(usize),
}

impl VarId {
    fn order(self, ncols: usize) -> usize {
        match self {
            VarId::Col(j) => j,
            VarId::Slack(i) => ncols + i,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    PivotLimit,
}

/// Scaled duals: `y = y_int / scale`.
struct ScaledDuals {
    scale: i128,
    y: Vec<i128>,
}

fn scale_duals(y: &[Rational]) -> Option<ScaledDuals> {
    let mut lcm = BigInt::one();
    for v in y {
        if !v.is_zero() {
            lcm = lcm.lcm(v.denom());
        }
    }
    // Keep room for sums of many terms.
    let limit = BigInt::one() << 90;
    if lcm > limit {
        return None;
    }
    let scale = lcm.to_i128()?;
    let mut out = Vec::with_capacity(y.len());
    for v in y {
        let s = v.numer() * (&lcm / v.denom());
        if s.abs() > limit {
            return None;
        }
        out.push(s.to_i128()?);
    }
    Some(ScaledDuals { scale, y: out })
}

/// Incremental simplex state; columns may be added between solves.
pub struct Simplex {
    rhs: Vec<Rational>,
    columns: Vec<Column>,
    basis: Vec<VarId>,
    in_basis: Vec<bool>,
    xb: Vec<Rational>,
    binv: Vec<Vec<Rational>>,
    y: Vec<Rational>,
    pivots: usize,
    degenerate: usize,
    bland: bool,
    integer_costs: bool,
}

impl Simplex {
    pub fn new(rhs: Vec<Rational>) -> Result<Self, LpError> {
        if let Some(row) = rhs.iter().position(Rational::is_negative) {
            return Err(LpError::NegativeRhs { row });
        }
        let m = rhs.len();
        let binv = (0..m)
            .map(|i| (0..m).map(|k| if i == k { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        Ok(Simplex {
            xb: rhs.clone(),
            rhs,
            columns: Vec::new(),
            basis: (0..m).map(VarId::Slack).collect(),
            in_basis: Vec::new(),
            binv,
            y: vec![Rational::zero(); m],
            pivots: 0,
            degenerate: 0,
            bland: false,
            integer_costs: true,
        })
    }

    pub fn from_problem(p: &LpProblem) -> Result<Self, LpError> {
        let mut s = Simplex::new(p.rhs.clone())?;
        for c in &p.columns {
            s.add_column(c.clone())?;
        }
        Ok(s)
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    /// Appends a nonbasic column; the current basis stays primal feasible.
    pub fn add_column(&mut self, col: Column) -> Result<usize, LpError> {
        if let Some(&(row, _)) = col.entries.iter().find(|(r, _)| *r >= self.rows()) {
            return Err(LpError::Dimension { column: self.columns.len(), row });
        }
        self.integer_costs &= col.cost.is_integer() && col.cost.numer().to_i64().is_some();
        self.columns.push(col);
        self.in_basis.push(false);
        Ok(self.columns.len() - 1)
    }

    /// Runs the floating-point simplex on the current columns and adopts
    /// its final basis if it checks out exactly; otherwise keeps the
    /// current basis. The result only affects speed.
    pub fn warm_start(&mut self) {
        let rhs: Vec<f64> = self.rhs.iter().map(|r| r.inner().to_f64().unwrap_or(0.0)).collect();
        let mut f = FloatSimplex::new(&rhs);
        for c in &self.columns {
            f.add_column(c);
        }
        let budget = 20 * (self.rows() + self.columns.len()) + 1000;
        if f.solve(budget).is_ok() && !self.set_basis(f.basis()) {
            log::debug!("float basis rejected");
        }
    }

    /// Replaces the current basis by `basis` (one variable per row),
    /// recomputing the inverse, values and duals exactly. Returns false and
    /// leaves the state untouched if the basis is singular or infeasible.
    pub(crate) fn set_basis(&mut self, basis: &[VarId]) -> bool {
        let m = self.rows();
        if basis.len() != m {
            return false;
        }
        let mut slack_basic = vec![false; m];
        let mut structural = Vec::new();
        for (pos, v) in basis.iter().enumerate() {
            match *v {
                VarId::Slack(i) if i < m && !slack_basic[i] => slack_basic[i] = true,
                VarId::Col(j) if j < self.columns.len() => structural.push((pos, j)),
                _ => return false,
            }
        }
        let tight: Vec<usize> = (0..m).filter(|&i| !slack_basic[i]).collect();
        let k = tight.len();
        if structural.len() != k {
            return false;
        }
        let mut tight_pos = vec![usize::MAX; m];
        for (t, &row) in tight.iter().enumerate() {
            tight_pos[row] = t;
        }
        // Gauss-Jordan on M = A[tight, structural] with M⁻¹ alongside.
        let mut a = vec![vec![Rational::zero(); k]; k];
        for (s, &(_, j)) in structural.iter().enumerate() {
            for &(r, v) in &self.columns[j].entries {
                if tight_pos[r] != usize::MAX {
                    a[tight_pos[r]][s] = Rational::from_int(v);
                }
            }
        }
        let mut inv: Vec<Vec<Rational>> =
            (0..k).map(|i| (0..k).map(|c| if i == c { Rational::one() } else { Rational::zero() }).collect()).collect();
        for c in 0..k {
            let Some(p) = (c..k).find(|&i| !a[i][c].is_zero()) else {
                return false;
            };
            a.swap(p, c);
            inv.swap(p, c);
            let piv = a[c][c].recip().expect("nonzero pivot");
            let a_row: Vec<(usize, Rational)> =
                (0..k).filter(|&q| !a[c][q].is_zero()).map(|q| (q, &a[c][q] * &piv)).collect();
            let inv_row: Vec<(usize, Rational)> =
                (0..k).filter(|&q| !inv[c][q].is_zero()).map(|q| (q, &inv[c][q] * &piv)).collect();
            for i in 0..k {
                if i == c || a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].clone();
                for (q, v) in &a_row {
                    let delta = &f * v;
                    a[i][*q] -= &delta;
                }
                for (q, v) in &inv_row {
                    let delta = &f * v;
                    inv[i][*q] -= &delta;
                }
            }
            a[c] = vec![Rational::zero(); k];
            for (q, v) in a_row {
                a[c][q] = v;
            }
            inv[c] = vec![Rational::zero(); k];
            for (q, v) in inv_row {
                inv[c][q] = v;
            }
        }
        // Row s of M⁻¹ belongs to structural variable s; slack rows are
        // e_ℓ − A[ℓ, structural]·M⁻¹.
        let mut binv = vec![vec![Rational::zero(); m]; m];
        for (s, &(pos, _)) in structural.iter().enumerate() {
            for (t, &row) in tight.iter().enumerate() {
                binv[pos][row] = inv[s][t].clone();
            }
        }
        let mut col_rows: Vec<Vec<(usize, i64)>> = vec![Vec::new(); m];
        for (s, &(_, j)) in structural.iter().enumerate() {
            for &(r, v) in &self.columns[j].entries {
                if slack_basic[r] {
                    col_rows[r].push((s, v));
                }
            }
        }
        for (pos, v) in basis.iter().enumerate() {
            let VarId::Slack(l) = *v else { continue };
            let row = &mut binv[pos];
            row[l] = Rational::one();
            for &(s, coef) in &col_rows[l] {
                let c = Rational::from_int(coef);
                for (t, &trow) in tight.iter().enumerate() {
                    if !inv[s][t].is_zero() {
                        let delta = &c * &inv[s][t];
                        row[trow] -= &delta;
                    }
                }
            }
        }
        let xb: Vec<Rational> = binv
            .iter()
            .map(|row| row.iter().zip(&self.rhs).filter(|(v, _)| !v.is_zero()).map(|(v, b)| v * b).sum())
            .collect();
        if xb.iter().any(Rational::is_negative) {
            return false;
        }
        let mut y = vec![Rational::zero(); m];
        for (pos, v) in basis.iter().enumerate() {
            let VarId::Col(j) = *v else { continue };
            let cost = &self.columns[j].cost;
            if cost.is_zero() {
                continue;
            }
            for (yk, b) in y.iter_mut().zip(&binv[pos]) {
                if !b.is_zero() {
                    *yk += &(cost * b);
                }
            }
        }
        self.in_basis = vec![false; self.columns.len()];
        for &(_, j) in &structural {
            self.in_basis[j] = true;
        }
        self.basis = basis.to_vec();
        self.binv = binv;
        self.xb = xb;
        self.y = y;
        self.degenerate = 0;
        self.bland = false;
        true
    }

    pub fn objective(&self) -> Rational {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter_map(|(v, x)| match v {
                VarId::Col(j) => Some(&self.columns[*j].cost * x),
                VarId::Slack(_) => None,
            })
            .sum()
    }

    pub fn duals(&self) -> &[Rational] {
        &self.y
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    fn reduced_cost_exact(&self, j: usize) -> Rational {
        let col = &self.columns[j];
        let mut acc = col.cost.clone();
        for &(r, a) in &col.entries {
            acc -= &(&Rational::from_int(a) * &self.y[r]);
        }
        acc
    }

    /// Entering variable and its reduced cost: the largest reduced cost
    /// (Dantzig), or the first positive one in Bland mode.
    fn entering(&self) -> Option<(VarId, Rational)> {
        if self.integer_costs {
            if let Some(sd) = scale_duals(&self.y) {
                if let Some(found) = self.entering_scaled(&sd) {
                    return found;
                }
            }
        }
        let candidates = (0..self.columns.len())
            .filter(|&j| !self.in_basis[j])
            .map(|j| (VarId::Col(j), self.reduced_cost_exact(j)))
            .chain((0..self.rows()).map(|i| (VarId::Slack(i), -&self.y[i])));
        let mut best: Option<(VarId, Rational)> = None;
        for (v, rc) in candidates {
            if !rc.is_positive() {
                continue;
            }
            if self.bland {
                return Some((v, rc));
            }
            if best.as_ref().is_none_or(|(_, b)| rc > *b) {
                best = Some((v, rc));
            }
        }
        best
    }

    /// Integer pass; `None` if some cost overflows the scaled range.
    fn entering_scaled(&self, sd: &ScaledDuals) -> Option<Option<(VarId, Rational)>> {
        let mut best: Option<(VarId, i128)> = None;
        for (j, col) in self.columns.iter().enumerate() {
            if self.in_basis[j] {
                continue;
            }
            let mut acc = col.cost.numer().to_i128()?.checked_mul(sd.scale)?;
            for &(r, a) in &col.entries {
                acc -= a as i128 * sd.y[r];
            }
            if acc > 0 && best.is_none_or(|(_, b)| acc > b) {
                best = Some((VarId::Col(j), acc));
                if self.bland {
                    break;
                }
            }
        }
        if best.is_none() || !self.bland {
            for i in 0..self.rows() {
                let acc = -sd.y[i];
                if acc > 0 && best.is_none_or(|(_, b)| acc > b) {
                    best = Some((VarId::Slack(i), acc));
                    if self.bland {
                        break;
                    }
                }
            }
        }
        Some(best.map(|(v, acc)| {
            let rc = Rational::from_big(BigInt::from(acc), BigInt::from(sd.scale)).expect("scale is positive");
            (v, rc)
        }))
    }

    fn direction(&self, v: VarId) -> Vec<Rational> {
        let m = self.rows();
        match v {
            VarId::Slack(k) => (0..m).map(|i| self.binv[i][k].clone()).collect(),
            VarId::Col(j) => {
                let col = &self.columns[j];
                (0..m)
                    .map(|i| {
                        let mut acc = Rational::zero();
                        for &(r, a) in &col.entries {
                            let b = &self.binv[i][r];
                            if !b.is_zero() {
                                acc += &(b * &Rational::from_int(a));
                            }
                        }
                        acc
                    })
                    .collect()
            }
        }
    }

    /// Runs primal simplex until optimal or `max_pivots` more pivots.
    pub fn solve(&mut self, max_pivots: usize) -> Result<Status, LpError> {
        let ncols = self.columns.len();
        for _ in 0..max_pivots {
            let Some((enter, rc)) = self.entering() else {
                return Ok(Status::Optimal);
            };
            let d = self.direction(enter);
            let mut leave: Option<(usize, Rational)> = None;
            for (i, di) in d.iter().enumerate() {
                if !di.is_positive() {
                    continue;
                }
                let ratio = &self.xb[i] / di;
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i].order(ncols) < self.basis[*r].order(ncols))
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, theta)) = leave else {
                return Err(LpError::Unbounded {
                    column: match enter {
                        VarId::Col(j) => Some(j),
                        VarId::Slack(_) => None,
                    },
                });
            };
            self.pivot(enter, r, &d, &theta, &rc);
        }
        Ok(if self.entering().is_none() { Status::Optimal } else { Status::PivotLimit })
    }

    fn pivot(&mut self, enter: VarId, r: usize, d: &[Rational], theta: &Rational, rc: &Rational) {
        let m = self.rows();
        for i in 0..m {
            if i != r && !d[i].is_zero() {
                let delta = theta * &d[i];
                self.xb[i] -= &delta;
            }
        }
        self.xb[r] = theta.clone();
        let pivot_inv = d[r].recip().expect("pivot element is positive");
        let row_r: Vec<Rational> = self.binv[r].iter().map(|v| v * &pivot_inv).collect();
        let nz: Vec<usize> = (0..m).filter(|&k| !row_r[k].is_zero()).collect();
        for i in 0..m {
            if i == r || d[i].is_zero() {
                continue;
            }
            let factor = &d[i];
            let row = &mut self.binv[i];
            for &k in &nz {
                let delta = factor * &row_r[k];
                row[k] -= &delta;
            }
        }
        for &k in &nz {
            let delta = rc * &row_r[k];
            self.y[k] += &delta;
        }
        self.binv[r] = row_r;
        if let VarId::Col(j) = self.basis[r] {
            self.in_basis[j] = false;
        }
        if let VarId::Col(j) = enter {
            self.in_basis[j] = true;
        }
        self.basis[r] = enter;
        self.pivots += 1;
        if theta.is_zero() {
            self.degenerate += 1;
            if self.degenerate >= DEGENERATE_RUN {
                self.bland = true;
            }
        } else {
            self.degenerate = 0;
            self.bland = false;
        }
    }

    pub fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.columns.len()];
        for (v, val) in self.basis.iter().zip(&self.xb) {
            if let VarId::Col(j) = v {
                x[*j] = val.clone();
            }
        }
        x
    }

    pub fn max_reduced_cost(&self) -> Option<Rational> {
        (0..self.columns.len()).map(|j| self.reduced_cost_exact(j)).max()
    }

    pub fn solution(&self) -> LpSolution {
        LpSolution {
            primal: self.primal(),
            dual: self.y.clone(),
            objective: self.objective(),
            pivots: self.pivots,
            max_reduced_cost: self.max_reduced_cost(),
        }
    }
}

/// Solves the LP to optimality.
pub fn solve_exact(p: &LpProblem) -> Result<LpSolution, LpError> {
    let mut s = Simplex::from_problem(p)?;
    s.warm_start();
    match s.solve(usize::MAX)? {
        Status::Optimal => Ok(s.solution()),
        Status::PivotLimit => unreachable!("unbounded pivot budget"),
    }
}

/// A failed optimality condition.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LpViolation {
    #[error("primal weight of column {column} is negative")]
    NegativePrimal { column: usize },
    #[error("row {row}: Ax = {lhs} exceeds b = {rhs}")]
    RowExceeded { row: usize, lhs: Rational, rhs: Rational },
    #[error("dual value of row {row} is negative")]
    NegativeDual { row: usize },
    #[error("column {column}: yᵀa = {lhs} is below its cost {cost}")]
    DualInfeasible { column: usize, lhs: Rational, cost: Rational },
    #[error("primal objective {primal} differs from dual objective {dual}")]
    ObjectiveMismatch { primal: Rational, dual: Rational },
    #[error("solution has the wrong length")]
    Shape,
}

/// Checks primal feasibility, dual feasibility and equal objectives.
pub fn verify_solution(p: &LpProblem, s: &LpSolution) -> Result<(), LpViolation> {
    if s.primal.len() != p.columns.len() || s.dual.len() != p.rhs.len() {
        return Err(LpViolation::Shape);
    }
    let mut lhs = vec![Rational::zero(); p.rhs.len()];
    let mut primal_obj = Rational::zero();
    for (j, (col, x)) in p.columns.iter().zip(&s.primal).enumerate() {
        if x.is_negative() {
            return Err(LpViolation::NegativePrimal { column: j });
        }
        if x.is_zero() {
            continue;
        }
        primal_obj += &(&col.cost * x);
        for &(r, a) in &col.entries {
            lhs[r] += &(&Rational::from_int(a) * x);
        }
    }
    for (row, (l, b)) in lhs.into_iter().zip(&p.rhs).enumerate() {
        if &l > b {
            return Err(LpViolation::RowExceeded { row, lhs: l, rhs: b.clone() });
        }
    }
    if let Some(row) = s.dual.iter().position(Rational::is_negative) {
        return Err(LpViolation::NegativeDual { row });
    }
    for (j, col) in p.columns.iter().enumerate() {
        let mut acc = Rational::zero();
        for &(r, a) in &col.entries {
            acc += &(&Rational::from_int(a) * &s.dual[r]);
        }
        if acc < col.cost {
            return Err(LpViolation::DualInfeasible { column: j, lhs: acc, cost: col.cost.clone() });
        }
    }
    let dual_obj: Rational = p.rhs.iter().zip(&s.dual).map(|(b, y)| b * y).sum();
    if dual_obj != primal_obj {
        return Err(LpViolation::ObjectiveMismatch { primal: primal_obj, dual: dual_obj });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn col(entries: &[(usize, i64)], cost: i64) -> Column {
        Column::new(entries.to_vec(), Rational::from_int(cost))
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let p = LpProblem {
            rhs: vec![r(4, 1), r(12, 1), r(18, 1)],
            columns: vec![col(&[(0, 1), (2, 3)], 3), col(&[(1, 2), (2, 2)], 5)],
        };
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.objective, r(36, 1));
        assert_eq!(s.primal, vec![r(2, 1), r(6, 1)]);
        assert_eq!(s.dual, vec![r(0, 1), r(3, 2), r(1, 1)]);
        verify_solution(&p, &s).unwrap();
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example, rows scaled by 100.
        let p = LpProblem {
            rhs: vec![r(0, 1), r(0, 1), r(1, 1)],
            columns: vec![
                Column::new(vec![(0, 25), (1, 50)], r(3, 4)),
                Column::new(vec![(0, -6000), (1, -9000)], r(-150, 1)),
                Column::new(vec![(0, -4), (1, -2), (2, 1)], r(1, 50)),
                Column::new(vec![(0, 900), (1, 300)], r(-6, 1)),
            ],
        };
        let s = solve_exact(&p).unwrap();
        verify_solution(&p, &s).unwrap();
        assert_eq!(s.objective, r(1, 20));
    }

    #[test]
    fn unbounded_is_reported() {
        let p = LpProblem { rhs: vec![r(1, 1)], columns: vec![col(&[(0, 1)], 1), col(&[(0, -1)], 1)] };
        assert!(matches!(solve_exact(&p), Err(LpError::Unbounded { .. })));
    }

    #[test]
    fn negative_rhs_is_rejected() {
        assert!(matches!(Simplex::new(vec![r(-1, 1)]), Err(LpError::NegativeRhs { row: 0 })));
    }

    #[test]
    fn warm_start_after_adding_columns() {
        let mut s = Simplex::new(vec![r(1, 1), r(1, 1)]).unwrap();
        s.add_column(col(&[(0, 1)], 1)).unwrap();
        assert_eq!(s.solve(100).unwrap(), Status::Optimal);
        assert_eq!(s.objective(), r(1, 1));
        s.add_column(col(&[(1, 1)], 1)).unwrap();
        assert_eq!(s.solve(100).unwrap(), Status::Optimal);
        assert_eq!(s.objective(), r(2, 1));
        assert!(s.add_column(col(&[(2, 1)], 1)).is_err());
    }

    #[test]
    fn mutation_is_rejected() {
        let p = LpProblem { rhs: vec![r(1, 2)], columns: vec![col(&[(0, 1)], 1)] };
        let mut s = solve_exact(&p).unwrap();
        verify_solution(&p, &s).unwrap();
        s.primal[0] += &r(1, 1_000_000);
        assert!(matches!(verify_solution(&p, &s), Err(LpViolation::RowExceeded { row: 0, .. })));
    }

    #[test]
    fn set_basis_rejects_bad_bases() {
        // x + y ≤ 1, x + y ≤ 2
        let mut s = Simplex::new(vec![r(1, 1), r(2, 1)]).unwrap();
        s.add_column(col(&[(0, 1), (1, 1)], 1)).unwrap();
        s.add_column(col(&[(0, 1), (1, 1)], 2)).unwrap();
        let before = s.objective();
        // Both columns basic: singular.
        assert!(!s.set_basis(&[VarId::Col(0), VarId::Col(1)]));
        // x tight on row 1 gives x = 2 and slack 0 = -1: infeasible.
        assert!(!s.set_basis(&[VarId::Slack(0), VarId::Col(0)]));
        assert!(!s.set_basis(&[VarId::Slack(0)]));
        assert_eq!(s.objective(), before);
        assert!(s.set_basis(&[VarId::Col(1), VarId::Slack(1)]));
        assert_eq!(s.solve(100).unwrap(), Status::Optimal);
        assert_eq!(s.objective(), r(2, 1));
    }
}
