//! Column generation for `max Σ_s x_s  s.t.  Σ_s x_s·[c ∈ supp s] ≤ b(c)`.
//!
//! When `b` is invariant under a group of cell relabelings, the master
//! problem works on orbits: one variable per strategy orbit (its weight is
//! spread evenly over the members) and one row per cell class. Cells with
//! `b(c) = 0` are dropped from the master and excluded from pricing; they
//! receive dual value 1 in the certificate, which covers every strategy
//! touching them.

use std::collections::{BTreeMap, HashSet};

use log::{debug, info};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::boxes::Dims;
use crate::numeric::Rational;
use crate::strategies::{CellSymmetry, LocalDetStrategy, StrategyIter};

use super::certificate::min_dual_sum;
use super::float::FloatSimplex;
use super::pricing::{Pricer, MAX_OUTPUTS};
use super::{Certificate, Column, LpError, LpProblem, PrimalTerm, Simplex, Status};

#[derive(Clone, Debug)]
pub struct ColGenOptions {
    /// Aggregate rows and columns under the symmetries of `b`.
    pub symmetry: bool,
    pub max_iterations: usize,
    /// Improving columns added per pricing round.
    pub columns_per_round: usize,
}

impl Default for ColGenOptions {
    fn default() -> Self {
        ColGenOptions { symmetry: true, max_iterations: 5_000, columns_per_round: 16 }
    }
}

#[derive(Clone, Debug)]
pub struct ColGenReport {
    pub certificate: Certificate,
    pub iterations: usize,
    /// Master columns (orbits) generated.
    pub columns: usize,
    pub master_rows: usize,
    pub symmetry_generators: usize,
    pub pivots: usize,
}

fn mass_of(dims: Dims, rhs: &[Rational]) -> Rational {
    let mut m = Rational::zero();
    for x in 0..dims.outputs[0] {
        for y in 0..dims.outputs[1] {
            m += &rhs[dims.cell_index(x, y, 0, 0)];
        }
    }
    m
}

/// Integer image of `y` with a common positive scale, if small enough.
fn scale(y: &[Rational]) -> Option<(Vec<i128>, i128)> {
    let mut lcm = BigInt::one();
    for v in y {
        lcm = lcm.lcm(v.denom());
    }
    let limit = BigInt::one() << 90;
    if lcm > limit {
        return None;
    }
    let w = y
        .iter()
        .map(|v| {
            let s = v.numer() * (&lcm / v.denom());
            if s > limit {
                None
            } else {
                s.to_i128()
            }
        })
        .collect::<Option<Vec<_>>>()?;
    Some((w, lcm.to_i128()?))
}

struct Master {
    dims: Dims,
    sym: CellSymmetry,
    class_of: Vec<usize>,
    row_of_class: Vec<Option<usize>>,
    forbidden: Vec<bool>,
    reps: Vec<LocalDetStrategy>,
    known: HashSet<LocalDetStrategy>,
    simplex: Simplex,
    float: FloatSimplex,
}

/// Scale for rounding floating duals to pricing weights.
const FLOAT_SCALE: i128 = 1 << 40;
/// Reduced costs below this (relative) are ignored by the float stage.
const FLOAT_SLACK: i128 = 1 << 20;

/// Pivot budget for one float solve before handing over to exact pivots.
fn float_budget(rows: usize, columns: usize) -> usize {
    20 * (rows + columns) + 1000
}

impl Master {
    fn new(dims: Dims, rhs: &[Rational], symmetry: bool) -> Result<Self, LpError> {
        let sym = if symmetry { CellSymmetry::detect(dims, rhs) } else { CellSymmetry::trivial(dims) };
        let (class_of, classes) = sym.cell_classes();
        let mut class_rhs = vec![Rational::zero(); classes];
        for (c, b) in rhs.iter().enumerate() {
            class_rhs[class_of[c]] += b;
        }
        let mut row_of_class = vec![None; classes];
        let mut rows = Vec::new();
        for (k, r) in class_rhs.into_iter().enumerate() {
            if r.is_positive() {
                row_of_class[k] = Some(rows.len());
                rows.push(r);
            }
        }
        let forbidden = rhs.iter().map(Rational::is_zero).collect();
        let float_rhs: Vec<f64> = rows.iter().map(|r| r.inner().to_f64().unwrap_or(0.0)).collect();
        Ok(Master {
            float: FloatSimplex::new(&float_rhs),
            dims,
            sym,
            class_of,
            row_of_class,
            forbidden,
            reps: Vec::new(),
            known: HashSet::new(),
            simplex: Simplex::new(rows)?,
        })
    }

    fn canonical(&self, s: &LocalDetStrategy) -> LocalDetStrategy {
        if self.sym.is_trivial() {
            s.clone()
        } else {
            self.sym.canonical(s)
        }
    }

    /// Adds the orbit of `s`; false if it is already present.
    fn add(&mut self, s: &LocalDetStrategy) -> Result<bool, LpError> {
        let rep = self.canonical(s);
        if self.known.contains(&rep) {
            return Ok(false);
        }
        let entries = rep
            .support()
            .map(|c| (self.row_of_class[self.class_of[c]].expect("pricing avoids empty cells"), 1))
            .collect();
        let col = Column::new(entries, Rational::one());
        self.float.add_column(&col);
        self.simplex.add_column(col)?;
        self.known.insert(rep.clone());
        self.reps.push(rep);
        Ok(true)
    }

    /// Cell duals; empty cells get `empty`.
    fn cell_duals(&self, empty: &Rational) -> Vec<Rational> {
        let y = self.simplex.duals();
        (0..self.dims.cells())
            .map(|c| match self.row_of_class[self.class_of[c]] {
                Some(r) => y[r].clone(),
                None => empty.clone(),
            })
            .collect()
    }

    /// Solves the float master and returns new columns it finds improving.
    fn float_round(&mut self, keep: usize) -> Vec<LocalDetStrategy> {
        let budget = float_budget(self.simplex.rows(), self.reps.len());
        if self.float.solve(budget).is_err() {
            return Vec::new();
        }
        let y = self.float.duals();
        let w: Vec<i128> = (0..self.dims.cells())
            .map(|c| match self.row_of_class[self.class_of[c]] {
                Some(r) => (y[r] * FLOAT_SCALE as f64).round() as i128,
                None => 0,
            })
            .collect();
        let pricer = Pricer::new(self.dims, &w, &self.forbidden, self.sym.has_output_flips());
        pricer
            .best(keep, Some(FLOAT_SCALE - FLOAT_SLACK))
            .into_iter()
            .map(|p| p.strategy)
            .filter(|s| !self.known.contains(&self.canonical(s)))
            .collect()
    }

    /// Exact master solve from the float basis, then exact pricing.
    fn exact_round(&mut self, keep: usize) -> Result<(Vec<LocalDetStrategy>, Option<Rational>), LpError> {
        if !self.simplex.set_basis(self.float.basis()) {
            debug!("float basis rejected; continuing from the previous exact basis");
        }
        match self.simplex.solve(usize::MAX)? {
            Status::Optimal => {}
            Status::PivotLimit => unreachable!("unbounded pivot budget"),
        }
        Ok(self.price(keep))
    }

    /// Improving strategies (positive reduced cost), best first, and the
    /// largest reduced cost if some strategy improves.
    fn price(&self, keep: usize) -> (Vec<LocalDetStrategy>, Option<Rational>) {
        let duals = self.cell_duals(&Rational::zero());
        let fix_first = self.sym.has_output_flips();
        if let Some((w, d)) = scale(&duals) {
            let pricer = Pricer::new(self.dims, &w, &self.forbidden, fix_first);
            let best = pricer.best(keep, Some(d));
            let top = best.first().map(|p| Rational::from_big(BigInt::from(d - p.sum), BigInt::from(d)).expect("d > 0"));
            (best.into_iter().map(|p| p.strategy).collect(), top)
        } else {
            let duals = self.cell_duals(&Rational::one());
            let (min, s) = min_dual_sum(self.dims, &duals, None);
            let gap = &Rational::one() - &min;
            let improving = if gap.is_positive() { vec![s] } else { Vec::new() };
            (improving, Some(gap))
        }
    }
}

/// Exact `max_s (1 − Σ y(supp s))` over every strategy.
fn full_gap(dims: Dims, duals: &[Rational], fix_first: bool) -> Rational {
    match scale(duals) {
        Some((w, d)) => {
            let none = vec![false; dims.cells()];
            let best = Pricer::new(dims, &w, &none, fix_first).best(1, None);
            let sum = best[0].sum;
            Rational::from_big(BigInt::from(d - sum), BigInt::from(d)).expect("d > 0")
        }
        None => &Rational::one() - &min_dual_sum(dims, duals, None).0,
    }
}

/// Solves the local-part LP for `rhs` by column generation.
pub fn column_generation(dims: Dims, rhs: &[Rational], opts: &ColGenOptions) -> Result<ColGenReport, LpError> {
    if dims.outputs[0] > MAX_OUTPUTS || dims.outputs[1] > MAX_OUTPUTS {
        return Err(LpError::Unsupported);
    }
    if let Some(row) = rhs.iter().position(Rational::is_negative) {
        return Err(LpError::NegativeRhs { row });
    }
    let mut master = Master::new(dims, rhs, opts.symmetry)?;
    info!(
        "column generation: {} cells, {} master rows, {} symmetry generators",
        dims.cells(),
        master.simplex.rows(),
        master.sym.generators().len()
    );
    let keep = opts.columns_per_round.max(1);
    let mut iterations = 0;
    let mut last_gap: Option<Rational> = None;
    let mut converged = false;
    let mut exact_current = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        exact_current = false;
        let fresh = master.float_round(keep);
        if !fresh.is_empty() {
            debug!("iteration {iterations}: float stage adds {} columns", fresh.len());
            for s in &fresh {
                master.add(s)?;
            }
            continue;
        }
        let (improving, gap) = master.exact_round(keep)?;
        exact_current = true;
        debug!(
            "iteration {iterations}: objective {} gap {:?} columns {}",
            master.simplex.objective(),
            gap.as_ref().map(ToString::to_string),
            master.reps.len()
        );
        last_gap = gap;
        if improving.is_empty() {
            converged = true;
            break;
        }
        let mut added = false;
        for s in &improving {
            added |= master.add(s)?;
        }
        if !added {
            // Every improving column is already present: the master was not
            // optimal for these duals, which the simplex rules out.
            break;
        }
        exact_current = false;
    }
    if !exact_current {
        last_gap = master.exact_round(1)?.1;
    }
    let objective = master.simplex.objective();
    let lambda = master.simplex.primal();
    let mut weights: BTreeMap<LocalDetStrategy, Rational> = BTreeMap::new();
    for (rep, l) in master.reps.iter().zip(&lambda) {
        if l.is_zero() {
            continue;
        }
        let orbit = if master.sym.is_trivial() { vec![rep.clone()] } else { master.sym.orbit(rep) };
        let share = l / &Rational::from_int(orbit.len() as i64);
        for s in orbit {
            *weights.entry(s).or_insert_with(Rational::zero) += &share;
        }
    }
    let primal = weights.into_iter().map(|(strategy, weight)| PrimalTerm { strategy, weight }).collect();
    let dual = master.cell_duals(&Rational::one());
    let mass = mass_of(dims, rhs);
    let (certified, pricing_gap, upper_bound) = if converged {
        let gap = full_gap(dims, &dual, master.sym.has_output_flips());
        let ok = !gap.is_positive();
        let upper = if ok { objective.clone() } else { mass.clone() };
        (ok, Some(gap), upper)
    } else {
        // A dual with reduced costs ≤ d < 1 becomes feasible after scaling
        // by 1/(1 − d).
        let upper = match &last_gap {
            Some(d) if d < &Rational::one() => {
                let scaled = &objective / &(&Rational::one() - d);
                if scaled < mass {
                    scaled
                } else {
                    mass.clone()
                }
            }
            _ => mass.clone(),
        };
        (false, last_gap, upper)
    };
    let certificate = Certificate {
        dims,
        rhs: rhs.to_vec(),
        primal,
        dual,
        objective,
        pricing_gap,
        certified,
        upper_bound,
    };
    Ok(ColGenReport {
        certificate,
        iterations,
        columns: master.reps.len(),
        master_rows: master.simplex.rows(),
        symmetry_generators: master.sym.generators().len(),
        pivots: master.simplex.pivots(),
    })
}

/// Solves the LP with every strategy as an explicit column.
pub fn full_lp(dims: Dims, rhs: &[Rational], budget: u128) -> Result<ColGenReport, LpError> {
    let strategies: Vec<LocalDetStrategy> = StrategyIter::new(dims, budget)?.collect();
    let columns = strategies
        .iter()
        .map(|s| Column::new(s.support().map(|c| (c, 1)).collect(), Rational::one()))
        .collect();
    let problem = LpProblem { rhs: rhs.to_vec(), columns };
    let mut simplex = Simplex::from_problem(&problem)?;
    simplex.warm_start();
    simplex.solve(usize::MAX)?;
    let x = simplex.primal();
    let primal = strategies
        .into_iter()
        .zip(x)
        .filter(|(_, w)| !w.is_zero())
        .map(|(strategy, weight)| PrimalTerm { strategy, weight })
        .collect();
    let dual = simplex.duals().to_vec();
    let gap = simplex.max_reduced_cost().unwrap_or_else(Rational::zero);
    let objective = simplex.objective();
    let certified = !gap.is_positive();
    let certificate = Certificate {
        dims,
        rhs: rhs.to_vec(),
        primal,
        dual,
        upper_bound: objective.clone(),
        objective,
        pricing_gap: Some(gap),
        certified,
    };
    Ok(ColGenReport {
        certificate,
        iterations: 1,
        columns: problem.columns.len(),
        master_rows: rhs.len(),
        symmetry_generators: 0,
        pivots: simplex.pivots(),
    })
}
