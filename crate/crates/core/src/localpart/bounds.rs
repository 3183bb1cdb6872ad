use crate::numeric::{binomial, Rational, Scalar};

fn int(k: u64) -> Scalar {
    Scalar::frac(k as i64, 1)
}

/// `4^n Σ_{i=⌈n/2⌉}^{n} C(n,i) (1−ε)^{n−i} ε^i`: the total mass of the
/// cells losing at least half of the rounds, summed over all input pairs.
pub fn upper_bound_isotropic(n: u32, eps: &Scalar) -> Scalar {
    let one_minus = &Scalar::one() - eps;
    let sum: Scalar = (n.div_ceil(2)..=n)
        .map(|i| &(&int(binomial(n as u64, i as u64)) * &one_minus.pow(n - i)) * &eps.pow(i))
        .sum();
    &int(4u64.pow(n)) * &sum
}

/// Even `n`: `2^{n/2} C(n,n/2) ((1−ε)ε)^{n/2}`; odd `n`:
/// `2^{(n+3)/2} C(n,(n+1)/2) (1−ε)^{(n−1)/2} ε^{(n+1)/2}`.
pub fn lower_bound_isotropic(n: u32, eps: &Scalar) -> Scalar {
    let one_minus = &Scalar::one() - eps;
    let (pow2, c, a, b) = if n % 2 == 0 {
        (n / 2, binomial(n as u64, n as u64 / 2), n / 2, n / 2)
    } else {
        ((n + 3) / 2, binomial(n as u64, (n as u64 + 1) / 2), (n - 1) / 2, (n + 1) / 2)
    };
    &(&int(2u64.pow(pow2) * c) * &one_minus.pow(a)) * &eps.pow(b)
}

/// `(4ε)^{⌈n/2⌉}`, reached by decomposing the boxes in pairs.
pub fn pairing_lower_bound(n: u32, eps: &Scalar) -> Scalar {
    (&int(4) * eps).pow(n.div_ceil(2))
}

/// The three closed-form envelopes at one rational `ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub lower: Rational,
    pub pairing: Rational,
    pub upper: Rational,
}

impl Envelope {
    pub fn at(n: u32, eps: &Rational) -> Self {
        let e = Scalar::from(eps.clone());
        let val = |s: Scalar| s.eval(eps);
        Envelope {
            lower: val(lower_bound_isotropic(n, &e)),
            pairing: val(pairing_lower_bound(n, &e)),
            upper: val(upper_bound_isotropic(n, &e)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{Poly, Var};

    fn eps() -> Scalar {
        Scalar::var(Var::Eps)
    }

    fn poly(c: &[i64]) -> Scalar {
        Poly::from_ints(c, Var::Eps).into()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(upper_bound_isotropic(1, &eps()), poly(&[0, 4]));
        assert_eq!(upper_bound_isotropic(2, &eps()), poly(&[0, 32, -16]));
        assert_eq!(lower_bound_isotropic(2, &eps()), poly(&[0, 4, -4]));
        assert_eq!(lower_bound_isotropic(3, &eps()), poly(&[0, 0, 24, -24]));
        assert_eq!(pairing_lower_bound(1, &eps()), poly(&[0, 4]));
        assert_eq!(pairing_lower_bound(2, &eps()), poly(&[0, 4]));
        assert_eq!(pairing_lower_bound(3, &eps()), poly(&[0, 0, 16]));
    }

    #[test]
    fn vanish_at_zero() {
        for n in 1..=6 {
            let e = Envelope::at(n, &Rational::zero());
            assert!(e.lower.is_zero() && e.pairing.is_zero() && e.upper.is_zero());
        }
    }
}
