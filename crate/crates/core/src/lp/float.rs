//! Floating-point revised simplex used only to find a good starting basis
//! for the exact solver. Nothing it returns is trusted: the exact simplex
//! refactors the basis in rationals and continues from there.

use num_traits::ToPrimitive;

use super::simplex::{Column, VarId};
use super::LpError;

const TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
const DEGENERATE_RUN: usize = 50;
/// Relative size of the right-hand-side perturbation against degeneracy.
const PERTURB: f64 = 1e-7;

/// Deterministic pseudo-random factor in `[1/2, 1)` for row `i`.
fn jitter(i: usize) -> f64 {
    let h = (i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    0.5 + ((h >> 11) as f64) / ((1u64 << 54) as f64)
}

pub(crate) struct FloatSimplex {
    m: usize,
    rhs: Vec<f64>,
    columns: Vec<(Vec<(usize, f64)>, f64)>,
    /// Columns touching a row with zero right-hand side; they can only
    /// enter at value zero and are never priced.
    excluded: Vec<bool>,
    zero_row: Vec<bool>,
    basis: Vec<VarId>,
    in_basis: Vec<bool>,
    xb: Vec<f64>,
    /// Row-major `m × m`.
    binv: Vec<f64>,
    y: Vec<f64>,
    since_refactor: usize,
    degenerate: usize,
    pub(crate) pivots: usize,
}

impl FloatSimplex {
    pub(crate) fn new(rhs: &[f64]) -> Self {
        let m = rhs.len();
        let zero_row: Vec<bool> = rhs.iter().map(|&b| b <= 0.0).collect();
        let scale = rhs.iter().cloned().fold(0.0, f64::max);
        let rhs: Vec<f64> = rhs
            .iter()
            .enumerate()
            .map(|(i, &b)| if b <= 0.0 { 0.0 } else { b + PERTURB * (b + 1e-3 * scale) * jitter(i) })
            .collect();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        FloatSimplex {
            m,
            rhs: rhs.clone(),
            columns: Vec::new(),
            excluded: Vec::new(),
            zero_row,
            basis: (0..m).map(VarId::Slack).collect(),
            in_basis: Vec::new(),
            xb: rhs,
            binv,
            y: vec![0.0; m],
            since_refactor: 0,
            degenerate: 0,
            pivots: 0,
        }
    }

    pub(crate) fn add_column(&mut self, col: &Column) {
        let entries: Vec<(usize, f64)> = col.entries.iter().map(|&(r, a)| (r, a as f64)).collect();
        self.excluded.push(entries.iter().any(|&(r, a)| a > 0.0 && self.zero_row[r]));
        self.columns.push((entries, col.cost.inner().to_f64().unwrap_or(0.0)));
        self.in_basis.push(false);
    }

    pub(crate) fn duals(&self) -> &[f64] {
        &self.y
    }

    pub(crate) fn basis(&self) -> &[VarId] {
        &self.basis
    }

    fn entering(&self, bland: bool) -> Option<(VarId, f64)> {
        let mut best: Option<(VarId, f64)> = None;
        for (j, (entries, cost)) in self.columns.iter().enumerate() {
            if self.in_basis[j] || self.excluded[j] {
                continue;
            }
            let rc = cost - entries.iter().map(|&(r, a)| a * self.y[r]).sum::<f64>();
            if rc > TOL && best.is_none_or(|(_, b)| rc > b) {
                best = Some((VarId::Col(j), rc));
                if bland {
                    return best;
                }
            }
        }
        for i in 0..self.m {
            let rc = -self.y[i];
            if rc > TOL && best.is_none_or(|(_, b)| rc > b) {
                best = Some((VarId::Slack(i), rc));
                if bland {
                    return best;
                }
            }
        }
        best
    }

    fn direction(&self, v: VarId) -> Vec<f64> {
        let m = self.m;
        match v {
            VarId::Slack(k) => (0..m).map(|i| self.binv[i * m + k]).collect(),
            VarId::Col(j) => {
                let entries = &self.columns[j].0;
                (0..m).map(|i| entries.iter().map(|&(r, a)| a * self.binv[i * m + r]).sum()).collect()
            }
        }
    }

    fn basis_column(&self, v: VarId) -> Vec<(usize, f64)> {
        match v {
            VarId::Slack(k) => vec![(k, 1.0)],
            VarId::Col(j) => self.columns[j].0.clone(),
        }
    }

    /// Recomputes the inverse, values and duals from the basis.
    fn refactor(&mut self) {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (i, &v) in self.basis.iter().enumerate() {
            for (r, val) in self.basis_column(v) {
                a[r * m + i] = val;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let p = (c..m)
                .max_by(|&i, &k| a[i * m + c].abs().total_cmp(&a[k * m + c].abs()))
                .expect("nonempty range");
            if a[p * m + c].abs() < 1e-12 {
                return;
            }
            if p != c {
                for k in 0..m {
                    a.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let piv = a[c * m + c];
            for k in 0..m {
                a[c * m + k] /= piv;
                inv[c * m + k] /= piv;
            }
            for i in 0..m {
                let f = a[i * m + c];
                if i == c || f == 0.0 {
                    continue;
                }
                for k in 0..m {
                    a[i * m + k] -= f * a[c * m + k];
                    inv[i * m + k] -= f * inv[c * m + k];
                }
            }
        }
        self.binv = inv;
        self.xb = (0..m).map(|i| (0..m).map(|k| self.binv[i * m + k] * self.rhs[k]).sum::<f64>().max(0.0)).collect();
        let costs: Vec<f64> = self
            .basis
            .iter()
            .map(|v| match v {
                VarId::Col(j) => self.columns[*j].1,
                VarId::Slack(_) => 0.0,
            })
            .collect();
        self.y = (0..m).map(|k| (0..m).map(|i| costs[i] * self.binv[i * m + k]).sum()).collect();
        self.since_refactor = 0;
    }

    /// Runs until no reduced cost exceeds the tolerance or `max_pivots`
    /// pivots have been made.
    pub(crate) fn solve(&mut self, max_pivots: usize) -> Result<(), LpError> {
        let m = self.m;
        for _ in 0..max_pivots {
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor();
            }
            let Some((enter, rc)) = self.entering(self.degenerate >= DEGENERATE_RUN) else {
                return Ok(());
            };
            let d = self.direction(enter);
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                if d[i] <= TOL {
                    continue;
                }
                let ratio = self.xb[i].max(0.0) / d[i];
                let better = match leave {
                    None => true,
                    Some((r, best)) => ratio < best - 1e-12 || (ratio <= best + 1e-12 && d[i] > d[r]),
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
            for i in 0..m {
                if i != r && d[i] != 0.0 {
                    self.xb[i] = (self.xb[i] - theta * d[i]).max(0.0);
                }
            }
            self.xb[r] = theta;
            let inv = 1.0 / d[r];
            let row_r: Vec<f64> = self.binv[r * m..(r + 1) * m].iter().map(|v| v * inv).collect();
            for i in 0..m {
                if i == r || d[i] == 0.0 {
                    continue;
                }
                let f = d[i];
                for (b, rr) in self.binv[i * m..(i + 1) * m].iter_mut().zip(&row_r) {
                    *b -= f * rr;
                }
            }
            for (yk, rr) in self.y.iter_mut().zip(&row_r) {
                *yk += rc * rr;
            }
            self.binv[r * m..(r + 1) * m].copy_from_slice(&row_r);
            if let VarId::Col(j) = self.basis[r] {
                self.in_basis[j] = false;
            }
            if let VarId::Col(j) = enter {
                self.in_basis[j] = true;
            }
            self.basis[r] = enter;
            self.pivots += 1;
            self.since_refactor += 1;
            if theta > TOL {
                self.degenerate = 0;
            } else {
                self.degenerate += 1;
            }
        }
        Ok(())
    }
}
