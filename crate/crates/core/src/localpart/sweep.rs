use log::{debug, info, warn};
use rayon::prelude::*;

use crate::boxes::RangeCheck;
use crate::lp::Certificate;
use crate::numeric::{Poly, Rational, Scalar, Var};

use super::bounds::Envelope;
use super::{local_part, Family, LocalPartError, SolveOptions};

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub family: Family,
    pub solve: SolveOptions,
    /// Add three points inside every gap that separates two pieces.
    pub refine: bool,
    /// Degree bound for the fitted pieces; defaults to `n`.
    pub max_degree: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { family: Family::Isotropic, solve: SolveOptions::default(), refine: true, max_degree: None }
    }
}

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub param: Rational,
    pub value: Rational,
    /// Solver reported optimality and the certificate re-verified.
    pub certified: bool,
    /// Added by refinement rather than taken from the grid.
    pub refined: bool,
    pub certificate: Certificate,
}

/// A polynomial matching the local part exactly at a run of consecutive
/// certified points.
#[derive(Clone, Debug)]
pub struct Piece {
    pub lo: Rational,
    pub hi: Rational,
    pub poly: Poly,
    /// Indices into [`SweepResult::points`].
    pub points: Vec<usize>,
    /// More points than the degree bound needs, so the fit is forced.
    pub determined: bool,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub n: u32,
    pub family: Family,
    /// Sorted by parameter.
    pub points: Vec<SweepPoint>,
    pub pieces: Vec<Piece>,
    /// First certified parameter where the value drops below the
    /// half-rounds lower envelope (isotropic family only).
    pub lower_envelope_first_failure: Option<Rational>,
    /// Certified points outside `[pairing bound, upper bound]`.
    pub envelope_violations: Vec<Rational>,
    /// Whether certified values never decrease along the grid.
    pub monotone: bool,
    /// Adjacent pieces whose difference does not change sign across the
    /// gap between them (listed by left piece index).
    pub continuity_failures: Vec<usize>,
}

impl SweepResult {
    pub fn certified(&self) -> impl Iterator<Item = &SweepPoint> {
        self.points.iter().filter(|p| p.certified)
    }

    pub fn excluded(&self) -> Vec<&Rational> {
        self.points.iter().filter(|p| !p.certified).map(|p| &p.param).collect()
    }

    /// Piece id of each point (`None` for excluded points).
    pub fn piece_ids(&self) -> Vec<Option<usize>> {
        let mut ids = vec![None; self.points.len()];
        for (k, piece) in self.pieces.iter().enumerate() {
            for &i in &piece.points {
                ids[i] = Some(k);
            }
        }
        ids
    }

    /// Lowest-order nonzero term `(power, coefficient)` of the first piece.
    pub fn leading_term(&self) -> Option<(usize, Rational)> {
        let p = &self.pieces.first()?.poly;
        let k = p.lowest_order()?;
        Some((k, p.coeff(k)))
    }

    /// Parameters at which one piece ends and the next begins.
    pub fn breakpoints(&self) -> Vec<(Rational, Rational)> {
        self.pieces.windows(2).map(|w| (w[0].hi.clone(), w[1].lo.clone())).collect()
    }
}

/// `lo, lo + step, …` up to `hi` inclusive.
pub fn grid(step: &Rational, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    assert!(step.is_positive(), "grid step must be positive");
    let mut out = Vec::new();
    let mut x = lo.clone();
    while &x <= hi {
        out.push(x.clone());
        x += step;
    }
    out
}

/// Step `1/64` on `[0, 1/4]`.
pub fn default_grid() -> Vec<Rational> {
    grid(&Rational::frac(1, 64), &Rational::zero(), &Rational::frac(1, 4))
}

fn solve_point(n: u32, param: &Rational, opts: &SweepOptions, refined: bool) -> Result<SweepPoint, LocalPartError> {
    let b = opts.family.make(n, &Scalar::from(param.clone()), RangeCheck::Enforce)?;
    let lp = local_part(&b, &opts.solve)?;
    let verified = lp.certificate.verify();
    if let Err(e) = &verified {
        warn!("point {param}: certificate does not verify: {e}");
    }
    debug!("point {param}: {} ({} iterations)", lp.value, lp.iterations);
    Ok(SweepPoint { param: param.clone(), value: lp.value, certified: verified.is_ok(), refined, certificate: lp.certificate })
}

fn solve_all(n: u32, params: &[Rational], opts: &SweepOptions, refined: bool) -> Result<Vec<SweepPoint>, LocalPartError> {
    params.par_iter().map(|p| solve_point(n, p, opts, refined)).collect()
}

fn fit(samples: &[Sample], max_degree: usize, var: Var) -> Option<Poly> {
    let pts: Vec<(Rational, Rational)> = samples.iter().map(|s| (s.1.clone(), s.2.clone())).collect();
    let d = max_degree.min(pts.len().saturating_sub(1));
    Poly::interpolate(&pts, d, var).ok()
}

/// `(index into the point list, parameter, value)`.
type Sample<'a> = (usize, &'a Rational, &'a Rational);

/// Splits the certified points into runs that each fit one polynomial of
/// degree at most `max_degree`. Among partitions with the fewest runs, picks
/// one with the fewest points in runs too short to force their fit.
fn fit_pieces(samples: &[Sample], max_degree: usize, var: Var) -> Vec<Piece> {
    let m = samples.len();
    let run = |a: usize, b: usize| &samples[a..b];
    // reach[a]: largest b such that points a..b fit one polynomial.
    let reach: Vec<usize> = (0..m)
        .map(|a| {
            let mut b = a + 1;
            while b < m && fit(run(a, b + 1), max_degree, var).is_some() {
                b += 1;
            }
            b
        })
        .collect();
    let loose = |len: usize| if len > max_degree + 1 { 0 } else { len };
    let mut best: Vec<Option<((usize, usize), usize)>> = vec![None; m + 1];
    best[0] = Some(((0, 0), 0));
    for a in 0..m {
        let Some(((pieces, under), _)) = best[a] else { continue };
        for b in a + 1..=reach[a] {
            let cost = (pieces + 1, under + loose(b - a));
            if best[b].is_none_or(|(c, _)| cost < c) {
                best[b] = Some((cost, a));
            }
        }
    }
    let mut cuts = vec![m];
    while let Some(&b) = cuts.last().filter(|&&b| b > 0) {
        cuts.push(best[b].expect("every prefix is reachable").1);
    }
    cuts.reverse();
    cuts.windows(2)
        .map(|w| {
            let members = run(w[0], w[1]);
            Piece {
                lo: members[0].1.clone(),
                hi: members[members.len() - 1].1.clone(),
                poly: fit(members, max_degree, var).expect("run fits"),
                determined: members.len() > max_degree + 1,
                points: members.iter().map(|s| s.0).collect(),
            }
        })
        .collect()
}

fn fit_certified(points: &[SweepPoint], max_degree: usize, var: Var) -> Vec<Piece> {
    let samples: Vec<Sample> =
        points.iter().enumerate().filter(|(_, p)| p.certified).map(|(i, p)| (i, &p.param, &p.value)).collect();
    fit_pieces(&samples, max_degree, var)
}

/// Solves the family on `grid`, fits polynomial pieces, refines the gaps
/// between pieces once and refits, then runs the envelope checks.
pub fn sweep(n: u32, grid: &[Rational], opts: &SweepOptions) -> Result<SweepResult, LocalPartError> {
    let var = opts.family.var();
    let (lo, hi) = var.admissible();
    if let Some(bad) = grid.iter().find(|e| *e < &lo || *e > &hi) {
        return Err(LocalPartError::GridRange(bad.clone()));
    }
    let mut params = grid.to_vec();
    params.sort();
    params.dedup();
    let max_degree = opts.max_degree.unwrap_or(n as usize);
    info!("sweep: {} {} boxes, {} points", n, opts.family, params.len());
    let mut points = solve_all(n, &params, opts, false)?;
    let mut pieces = fit_certified(&points, max_degree, var);
    if opts.refine && pieces.len() > 1 {
        let four = Rational::from_int(4);
        let extra: Vec<Rational> = pieces
            .windows(2)
            .flat_map(|w| {
                let (a, b) = (w[0].hi.clone(), w[1].lo.clone());
                let step = &(&b - &a) / &four;
                (1..4).map(move |j| &a + &(&step * &Rational::from_int(j))).collect::<Vec<_>>()
            })
            .filter(|p| params.binary_search(p).is_err())
            .collect();
        info!("sweep: refining {} gaps with {} points", pieces.len() - 1, extra.len());
        points.extend(solve_all(n, &extra, opts, true)?);
        points.sort_by(|a, b| a.param.cmp(&b.param));
        pieces = fit_certified(&points, max_degree, var);
    }

    let mut lower_envelope_first_failure = None;
    let mut envelope_violations = Vec::new();
    let mut monotone = true;
    let mut prev: Option<&Rational> = None;
    for p in points.iter().filter(|p| p.certified) {
        if opts.family == Family::Isotropic {
            let env = Envelope::at(n, &p.param);
            if lower_envelope_first_failure.is_none() && p.value < env.lower {
                lower_envelope_first_failure = Some(p.param.clone());
            }
            if p.value < env.pairing || p.value > env.upper {
                envelope_violations.push(p.param.clone());
            }
        }
        if prev.is_some_and(|v| &p.value < v) {
            monotone = false;
        }
        prev = Some(&p.value);
    }
    let continuity_failures = pieces
        .windows(2)
        .enumerate()
        .filter(|(_, w)| {
            let d = |x: &Rational| &w[0].poly.eval(x) - &w[1].poly.eval(x);
            let (da, db) = (d(&w[0].hi), d(&w[1].lo));
            (da.is_positive() && db.is_positive()) || (da.is_negative() && db.is_negative())
        })
        .map(|(k, _)| k)
        .collect();
    Ok(SweepResult {
        n,
        family: opts.family,
        points,
        pieces,
        lower_envelope_first_failure,
        envelope_violations,
        monotone,
        continuity_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_prefers_forced_pieces() {
        // Lines through 2 points always fit, so a left-to-right greedy fit
        // would pair the stray first point with the start of 5x − 5.
        let xs: Vec<Rational> = (0..5).map(Rational::from_int).collect();
        let ys: Vec<Rational> = [7, 0, 5, 10, 15].into_iter().map(Rational::from_int).collect();
        let samples: Vec<Sample> = (0..5).map(|i| (i, &xs[i], &ys[i])).collect();
        let pieces = fit_pieces(&samples, 1, Var::Eps);
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0].points, vec![0]);
        assert_eq!(pieces[1].poly, Poly::from_ints(&[-5, 5], Var::Eps));
        assert!(pieces[1].determined);
    }

    #[test]
    fn grid_is_inclusive() {
        let g = default_grid();
        assert_eq!(g.len(), 17);
        assert_eq!(g[16], Rational::frac(1, 4));
    }

    #[test]
    fn one_box_is_a_single_linear_piece() {
        let r = sweep(1, &default_grid(), &SweepOptions::default()).unwrap();
        assert_eq!(r.pieces.len(), 1);
        assert_eq!(r.pieces[0].poly, Poly::from_ints(&[0, 4], Var::Eps));
        assert!(r.envelope_violations.is_empty() && r.monotone && r.continuity_failures.is_empty());
        assert_eq!(r.leading_term(), Some((1, Rational::from_int(4))));
    }

    #[test]
    fn biased_single_box_is_linear() {
        let opts = SweepOptions { family: Family::Biased, ..Default::default() };
        let g = grid(&Rational::frac(1, 30), &Rational::zero(), &Rational::frac(1, 3));
        let r = sweep(1, &g, &opts).unwrap();
        assert_eq!(r.pieces.len(), 1);
        assert_eq!(r.pieces[0].poly, Poly::from_ints(&[0, 3], Var::Delta));
    }

    #[test]
    fn out_of_range_grid_is_rejected() {
        let g = vec![Rational::frac(1, 2)];
        assert!(matches!(sweep(1, &g, &SweepOptions::default()), Err(LocalPartError::GridRange(_))));
    }
}
