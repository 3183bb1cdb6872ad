use crate::boxes::BoxTable;
use crate::lp::Certificate;
use crate::numeric::{binomial, Rational, Scalar};

use super::{local_part, LocalPartError, SolveOptions};

/// Largest `n` accepted by [`snk`].
pub const MAX_SNK_N: u32 = 3;

/// The local point closest to a perfect PR box: `½·PR + ½·uniform`.
pub fn p_quarter() -> BoxTable {
    let half = Scalar::frac(1, 2);
    BoxTable::mix(&[half.clone(), half], &[BoxTable::pr(1), BoxTable::uniform(1)]).expect("matching alphabets")
}

/// Sum of the `C(n,k)` tensor words with `k` factors `P^{(1/4)}` and
/// `n − k` factors PR, in every arrangement.
pub fn snk_box(n: u32, k: u32) -> BoxTable {
    assert!(k <= n, "k must not exceed n");
    let (pr, q) = (BoxTable::pr(1), p_quarter());
    let mut acc: Option<BoxTable> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() != k {
            continue;
        }
        let word = (0..n).rev().fold(BoxTable::trivial(), |w, i| {
            let factor = if mask >> i & 1 == 1 { &q } else { &pr };
            w.tensor(factor)
        });
        acc = Some(match acc {
            None => word,
            Some(a) => a.add(&word).expect("matching alphabets"),
        });
    }
    acc.expect("at least one word")
}

#[derive(Clone, Debug)]
pub struct SnkReport {
    pub n: u32,
    pub k: u32,
    pub snk: BoxTable,
    /// Local weight in absolute mass.
    pub local_mass: Rational,
    /// Local weight divided by the mass `C(n,k)`.
    pub fraction: Rational,
    pub certificate: Certificate,
}

/// Builds `S_{n,k}` and solves its local part.
pub fn snk(n: u32, k: u32, opts: &SolveOptions) -> Result<SnkReport, LocalPartError> {
    if k > n || n > MAX_SNK_N {
        return Err(LocalPartError::SnkRange { n, k, max: MAX_SNK_N });
    }
    let b = snk_box(n, k);
    debug_assert_eq!(b.mass(), &Scalar::frac(binomial(n as u64, k as u64) as i64, 1));
    let lp = local_part(&b, opts)?;
    Ok(SnkReport { n, k, snk: b, local_mass: lp.value, fraction: lp.fraction, certificate: lp.certificate })
}

/// Checks `Σ_k (4ε)^k (1−4ε)^{n−k} S_{n,k} = P^{n,ε}` cell by cell; `eps`
/// may be symbolic. On failure returns the first differing cell index.
pub fn snk_expansion_check(n: u32, eps: &Scalar) -> Result<(), usize> {
    let four_eps = &Scalar::frac(4, 1) * eps;
    let rest = &Scalar::one() - &four_eps;
    let weights: Vec<Scalar> = (0..=n).map(|k| &four_eps.pow(k) * &rest.pow(n - k)).collect();
    let parts: Vec<BoxTable> = (0..=n).map(|k| snk_box(n, k)).collect();
    let sum = BoxTable::mix(&weights, &parts).map_err(|_| 0usize)?;
    let target = BoxTable::isotropic_with(n, eps, crate::boxes::RangeCheck::Warn).map_err(|_| 0usize)?;
    match sum.table().iter().zip(target.table()).position(|(a, b)| a != b) {
        Some(c) => Err(c),
        None => Ok(()),
    }
}
