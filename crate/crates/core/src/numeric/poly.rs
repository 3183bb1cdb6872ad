use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{NumericError, Rational};

/// The formal noise parameter a polynomial is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    /// Isotropic noise ε.
    Eps,
    /// Biased noise δ.
    Delta,
}

impl Var {
    pub fn symbol(self) -> &'static str {
        match self {
            Var::Eps => "ε",
            Var::Delta => "δ",
        }
    }

    /// Default admissible parameter interval: ε ∈ [0, 1/4], δ ∈ [0, 1/3].
    pub fn admissible(self) -> (Rational, Rational) {
        match self {
            Var::Eps => (Rational::zero(), Rational::frac(1, 4)),
            Var::Delta => (Rational::zero(), Rational::frac(1, 3)),
        }
    }
}

/// Dense univariate polynomial over the rationals, constant term first.
///
/// Trailing zero coefficients are always trimmed, so the zero polynomial
/// has an empty coefficient list and equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
    var: Var,
}

impl Poly {
    pub fn new(coeffs: Vec<Rational>, var: Var) -> Self {
        let mut p = Poly { coeffs, var };
        p.trim();
        p
    }

    pub fn zero(var: Var) -> Self {
        Poly { coeffs: Vec::new(), var }
    }

    pub fn constant(c: Rational, var: Var) -> Self {
        Poly::new(vec![c], var)
    }

    /// The monomial `x`.
    pub fn x(var: Var) -> Self {
        Poly::new(vec![Rational::zero(), Rational::one()], var)
    }

    pub fn from_ints(coeffs: &[i64], var: Var) -> Self {
        Poly::new(coeffs.iter().map(|&c| Rational::from_int(c)).collect(), var)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Rational::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Index of the lowest nonzero coefficient.
    pub fn lowest_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect(), self.var)
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut acc = Poly::constant(Rational::one(), self.var);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Exact division; `None` unless `divisor` divides `self` with zero
    /// remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let d = divisor.degree()?;
        let lead = divisor.coeffs[d].clone();
        let var = join_var(self, divisor);
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return if self.is_zero() { Some(Poly::zero(var)) } else { None };
        }
        let mut quot = vec![Rational::zero(); rem.len() - d];
        for i in (0..quot.len()).rev() {
            let q = &rem[i + d] / &lead;
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &q * dc;
            }
            quot[i] = q;
        }
        if rem.iter().all(Rational::is_zero) {
            Some(Poly::new(quot, var))
        } else {
            None
        }
    }

    /// Decides `p(x) >= 0` for all `x` in `[lo, hi]` via Bernstein
    /// coefficients with bisection.
    ///
    /// Returns `false` when a negative value is found or when bisection
    /// cannot separate a tangential zero within the depth limit.
    pub fn nonneg_on(&self, lo: &Rational, hi: &Rational) -> bool {
        if self.is_zero() {
            return true;
        }
        let bern = self.bernstein(lo, hi);
        bernstein_nonneg(&bern, 48)
    }

    /// Bernstein coefficients of `self` on `[lo, hi]`, degree = `self.degree()`.
    fn bernstein(&self, lo: &Rational, hi: &Rational) -> Vec<Rational> {
        let d = self.degree().unwrap_or(0);
        // Substitute x = lo + (hi - lo) t and expand in t.
        let width = hi - lo;
        let shift = Poly::new(vec![lo.clone(), width], self.var);
        let mut t_poly = Poly::zero(self.var);
        for c in self.coeffs.iter().rev() {
            t_poly = &(&t_poly * &shift) + &Poly::constant(c.clone(), self.var);
        }
        // Power basis a_j -> Bernstein b_k = sum_{j<=k} C(k,j)/C(d,j) a_j.
        (0..=d)
            .map(|k| {
                (0..=k)
                    .map(|j| {
                        t_poly.coeff(j) * Rational::from_int(binomial(k as u64, j as u64) as i64)
                            / Rational::from_int(binomial(d as u64, j as u64) as i64)
                    })
                    .sum()
            })
            .collect()
    }

    /// Unique polynomial of degree `<= max_degree` through the first
    /// `max_degree + 1` points, provided it also passes through every
    /// remaining point.
    pub fn interpolate(
        points: &[(Rational, Rational)],
        max_degree: usize,
        var: Var,
    ) -> Result<Poly, NumericError> {
        for (i, (xi, _)) in points.iter().enumerate() {
            if points[..i].iter().any(|(xj, _)| xj == xi) {
                return Err(NumericError::DuplicateAbscissa(xi.to_string()));
            }
        }
        if points.len() < max_degree + 1 {
            return Err(NumericError::TooFewPoints {
                needed: max_degree + 1,
                got: points.len(),
            });
        }
        let basis = &points[..=max_degree];
        let poly = lagrange(basis, var);
        for (idx, (x, y)) in points.iter().enumerate().skip(max_degree + 1) {
            if &poly.eval(x) != y {
                return Err(NumericError::NoFit { index: idx });
            }
        }
        Ok(poly)
    }
}

fn lagrange(points: &[(Rational, Rational)], var: Var) -> Poly {
    let mut acc = Poly::zero(var);
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut term = Poly::constant(yi.clone(), var);
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let denom = xi - xj;
            let factor = Poly::new(vec![-xj / &denom, Rational::one() / &denom], var);
            term = &term * &factor;
        }
        acc = &acc + &term;
    }
    acc
}

fn bernstein_nonneg(coeffs: &[Rational], depth: u32) -> bool {
    let first = &coeffs[0];
    let last = &coeffs[coeffs.len() - 1];
    if first.is_negative() || last.is_negative() {
        return false;
    }
    if coeffs.iter().all(|c| !c.is_negative()) {
        return true;
    }
    if depth == 0 {
        return false;
    }
    let (left, right) = de_casteljau_split(coeffs);
    bernstein_nonneg(&left, depth - 1) && bernstein_nonneg(&right, depth - 1)
}

fn de_casteljau_split(coeffs: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let half = Rational::frac(1, 2);
    let mut work = coeffs.to_vec();
    let n = work.len();
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    left.push(work[0].clone());
    right.push(work[n - 1].clone());
    for level in 1..n {
        for i in 0..n - level {
            work[i] = (&work[i] + &work[i + 1]) * &half;
        }
        left.push(work[0].clone());
        right.push(work[n - level - 1].clone());
    }
    right.reverse();
    (left, right)
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn join_var(a: &Poly, b: &Poly) -> Var {
    if a.var == b.var || b.is_constant() {
        a.var
    } else if a.is_constant() {
        b.var
    } else {
        panic!("polynomials in different variables: {:?} vs {:?}", a.var, b.var)
    }
}

impl<'a, 'b> Add<&'b Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'b Poly) -> Poly {
        let var = join_var(self, rhs);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect(), var)
    }
}

impl<'a, 'b> Sub<&'b Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'b Poly) -> Poly {
        let var = join_var(self, rhs);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect(), var)
    }
}

impl<'a, 'b> Mul<&'b Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'b Poly) -> Poly {
        let var = join_var(self, rhs);
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(var);
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out, var)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect(), self.var)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", c.abs()) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let sym = self.var.symbol();
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}·")?;
                    }
                    if i == 1 {
                        write!(f, "{sym}")?;
                    } else {
                        write!(f, "{sym}^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn eval_examples() {
        let four_eps = Poly::from_ints(&[0, 4], Var::Eps);
        assert_eq!(four_eps.eval(&r(1, 8)), r(1, 2));
        assert_eq!(Poly::zero(Var::Eps).eval(&r(7, 3)), Rational::zero());
        let nine_delta_sq = Poly::from_ints(&[0, 3], Var::Delta).pow(2);
        assert_eq!(nine_delta_sq, Poly::from_ints(&[0, 0, 9], Var::Delta));
        assert_eq!(nine_delta_sq.eval(&r(1, 9)), r(1, 9));
    }

    #[test]
    fn interpolate_examples() {
        let pts = vec![(r(0, 1), r(0, 1)), (r(1, 8), r(1, 2)), (r(1, 4), r(1, 1))];
        let p = Poly::interpolate(&pts, 1, Var::Eps).unwrap();
        assert_eq!(p, Poly::from_ints(&[0, 4], Var::Eps));

        let pts = vec![(r(0, 1), r(0, 1)), (r(1, 1), r(1, 1)), (r(2, 1), r(4, 1))];
        let p = Poly::interpolate(&pts, 2, Var::Eps).unwrap();
        assert_eq!(p, Poly::from_ints(&[0, 0, 1], Var::Eps));
    }

    #[test]
    fn interpolate_failures() {
        let dup = vec![(r(0, 1), r(0, 1)), (r(0, 1), r(1, 1))];
        assert!(matches!(
            Poly::interpolate(&dup, 1, Var::Eps),
            Err(NumericError::DuplicateAbscissa(_))
        ));
        // |x| sampled across its kink has no linear fit.
        let kink = vec![(r(-1, 1), r(1, 1)), (r(0, 1), r(0, 1)), (r(1, 1), r(1, 1))];
        assert_eq!(
            Poly::interpolate(&kink, 1, Var::Eps),
            Err(NumericError::NoFit { index: 2 })
        );
        assert!(matches!(
            Poly::interpolate(&kink[..1], 1, Var::Eps),
            Err(NumericError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn equality_is_structural() {
        let a = Poly::from_ints(&[0, 4], Var::Eps);
        let b = &Poly::from_ints(&[0, 4, -1], Var::Eps) + &Poly::from_ints(&[0, 0, 1], Var::Eps);
        assert_eq!(a, b);
        assert_ne!(a, Poly::from_ints(&[0, 4, -1], Var::Eps));
    }

    #[test]
    fn exact_division() {
        let one_minus_4e = Poly::from_ints(&[1, -4], Var::Eps);
        let prod = &one_minus_4e * &Poly::new(vec![r(1, 2), r(3, 7)], Var::Eps);
        assert_eq!(
            prod.div_exact(&one_minus_4e).unwrap(),
            Poly::new(vec![r(1, 2), r(3, 7)], Var::Eps)
        );
        assert!(Poly::from_ints(&[1, 0, 1], Var::Eps).div_exact(&one_minus_4e).is_none());
    }

    #[test]
    fn bernstein_positivity() {
        let (lo, hi) = Var::Eps.admissible();
        // 1 - 4ε touches zero at the right endpoint.
        assert!(Poly::from_ints(&[1, -4], Var::Eps).nonneg_on(&lo, &hi));
        assert!(!Poly::from_ints(&[1, -5], Var::Eps).nonneg_on(&lo, &hi));
        // (ε - 1/8)^2 + 1/1000 is positive but has mixed-sign power coefficients.
        let p = &Poly::new(vec![r(-1, 8), r(1, 1)], Var::Eps).pow(2)
            + &Poly::constant(r(1, 1000), Var::Eps);
        assert!(p.nonneg_on(&lo, &hi));
        // ε(1/8 - ε) dips below zero past 1/8.
        let q = Poly::new(vec![r(0, 1), r(1, 8), r(-1, 1)], Var::Eps);
        assert!(!q.nonneg_on(&lo, &hi));
        assert!(q.nonneg_on(&lo, &r(1, 8)));
    }

    #[test]
    fn display() {
        let p = Poly::new(vec![r(0, 1), r(1, 16), r(-1, 8)], Var::Eps);
        assert_eq!(p.to_string(), "1/16·ε - 1/8·ε^2");
        assert_eq!(binomial(5, 2), 10);
    }
}
