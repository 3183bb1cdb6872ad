use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{NumericError, Poly, Rational, Var};

/// A probability entry: either a concrete rational or a polynomial in the
/// noise parameter.
///
/// Results are kept canonical: a polynomial of degree zero collapses back to
/// a rational, so `Scalar` equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(Rational),
    Poly(Poly),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(Rational::one())
    }

    pub fn var(v: Var) -> Self {
        Scalar::Poly(Poly::x(v))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Scalar::Rat(Rational::frac(n, d))
    }

    fn canonical(p: Poly) -> Self {
        if p.is_constant() {
            Scalar::Rat(p.coeff(0))
        } else {
            Scalar::Poly(p)
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Poly(_) => None,
        }
    }

    pub fn variable(&self) -> Option<Var> {
        match self {
            Scalar::Rat(_) => None,
            Scalar::Poly(p) => Some(p.var()),
        }
    }

    pub fn to_poly(&self, var: Var) -> Poly {
        match self {
            Scalar::Rat(r) => Poly::constant(r.clone(), var),
            Scalar::Poly(p) => p.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_zero())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        match self {
            Scalar::Rat(r) => r.clone(),
            Scalar::Poly(p) => p.eval(x),
        }
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(r.pow(exp)),
            Scalar::Poly(p) => Scalar::canonical(p.pow(exp)),
        }
    }

    /// Nonnegativity over the admissible interval of the entry's variable
    /// (rationals are checked directly).
    pub fn is_nonneg(&self) -> bool {
        match self {
            Scalar::Rat(r) => !r.is_negative(),
            Scalar::Poly(p) => {
                let (lo, hi) = p.var().admissible();
                p.nonneg_on(&lo, &hi)
            }
        }
    }

    /// Exact quotient; fails on division by zero or when the divisor does
    /// not divide a polynomial numerator.
    pub fn div_exact(&self, rhs: &Scalar) -> Result<Scalar, NumericError> {
        match (self, rhs) {
            (_, Scalar::Rat(d)) => {
                let inv = d.recip()?;
                Ok(self * &Scalar::Rat(inv))
            }
            (Scalar::Rat(n), Scalar::Poly(d)) => {
                Poly::constant(n.clone(), d.var()).div_exact(d).map(Scalar::canonical).ok_or(NumericError::NotDivisible)
            }
            (Scalar::Poly(n), Scalar::Poly(d)) => n.div_exact(d).map(Scalar::canonical).ok_or(NumericError::NotDivisible),
        }
    }
}

fn lift(a: &Scalar, b: &Scalar) -> (Poly, Poly) {
    let var = a.variable().or(b.variable()).unwrap_or(Var::Eps);
    (a.to_poly(var), b.to_poly(var))
}

impl<'a, 'b> Add<&'b Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'b Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => {
                let (a, b) = lift(self, rhs);
                Scalar::canonical(&a + &b)
            }
        }
    }
}

impl<'a, 'b> Sub<&'b Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'b Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a - b),
            _ => {
                let (a, b) = lift(self, rhs);
                Scalar::canonical(&a - &b)
            }
        }
    }
}

impl<'a, 'b> Mul<&'b Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'b Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Poly(p), Scalar::Rat(k)) | (Scalar::Rat(k), Scalar::Poly(p)) => Scalar::canonical(p.scale(k)),
            (Scalar::Poly(a), Scalar::Poly(b)) => Scalar::canonical(a * b),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Poly(p) => Scalar::Poly(-p),
        }
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rat(r)
    }
}

impl From<Poly> for Scalar {
    fn from(p: Poly) -> Self {
        Scalar::canonical(p)
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Self {
        iter.fold(Scalar::zero(), |acc, x| &acc + &x)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Poly(p) => write!(f, "{p}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// JSON shape of a scalar: `"p/q"` for rationals, `["c0", "c1", ...]` for
/// polynomials (constant term first).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarRepr {
    Rat(Rational),
    Poly(Vec<Rational>),
}

impl ScalarRepr {
    pub fn from_scalar(s: &Scalar) -> Self {
        match s {
            Scalar::Rat(r) => ScalarRepr::Rat(r.clone()),
            Scalar::Poly(p) => ScalarRepr::Poly(p.coeffs().to_vec()),
        }
    }

    pub fn into_scalar(self, var: Var) -> Scalar {
        match self {
            ScalarRepr::Rat(r) => Scalar::Rat(r),
            ScalarRepr::Poly(c) => Scalar::from(Poly::new(c, var)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_mode_promotes_and_collapses() {
        let eps = Scalar::var(Var::Eps);
        let half = Scalar::frac(1, 2);
        let s = &(&half + &eps) - &eps;
        assert_eq!(s, half);
        assert!(matches!(s, Scalar::Rat(_)));
        let p = &eps * &Scalar::frac(4, 1);
        assert_eq!(p.eval(&Rational::frac(1, 8)), Rational::frac(1, 2));
    }

    #[test]
    fn pr_plus_uniform_mixture() {
        // 2ε · (1/4) + (1 - 2ε) · (1/2) = 1/2 - ε/2
        let eps = Scalar::var(Var::Eps);
        let two_eps = &Scalar::frac(2, 1) * &eps;
        let lhs = &(&two_eps * &Scalar::frac(1, 4)) + &(&(&Scalar::one() - &two_eps) * &Scalar::frac(1, 2));
        let rhs = &Scalar::frac(1, 2) - &(&eps * &Scalar::frac(1, 2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn exact_division() {
        let eps = Scalar::var(Var::Eps);
        let one_minus = &Scalar::one() - &(&Scalar::frac(4, 1) * &eps);
        let half = Scalar::frac(1, 2);
        let prod = &one_minus * &half;
        assert_eq!(prod.div_exact(&one_minus).unwrap(), half);
        assert!(half.div_exact(&Scalar::zero()).is_err());
        assert_eq!(Scalar::one().div_exact(&eps), Err(NumericError::NotDivisible));
    }
}
