//! Round-loss searches over the strategies of `n` binary boxes.
//!
//! The searches fix Bob's function one input at a time and keep, for every
//! Alice input `u`, the bitmask of outputs `x` still compatible with the
//! constraint at all `v` seen so far. A branch dies as soon as one mask is
//! empty.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boxes::rounds_lost_at;

use super::{LocalDetStrategy, StrategyError, StrategyIter, DEFAULT_BUDGET};

/// Seed used by the sampled checks unless the caller overrides it.
pub const DEFAULT_SEED: u64 = 0x5eed_2009;

/// Largest `n` for the mask searches (masks are `u64`).
pub const MAX_MASK_ROUNDS: u32 = 6;

struct MaskSearch {
    size: usize,
    /// `allowed[(u * size + v) * size + y]`: outputs `x` allowed at `(u, v)`
    /// when Bob answers `y`.
    allowed: Vec<u64>,
    fix_first: bool,
    nodes: u64,
}

impl MaskSearch {
    fn new(n: u32, fix_first: bool, mut ok: impl FnMut(usize, usize, usize, usize) -> bool) -> Self {
        assert!(n <= MAX_MASK_ROUNDS, "mask search supports at most {MAX_MASK_ROUNDS} boxes");
        let size = 1usize << n;
        let mut allowed = vec![0u64; size * size * size];
        for u in 0..size {
            for v in 0..size {
                for y in 0..size {
                    let mut m = 0u64;
                    for x in 0..size {
                        if ok(x, y, u, v) {
                            m |= 1 << x;
                        }
                    }
                    allowed[(u * size + v) * size + y] = m;
                }
            }
        }
        MaskSearch { size, allowed, fix_first, nodes: 0 }
    }

    fn first(&mut self, v: usize, masks: &mut Vec<u64>, g: &mut Vec<u32>) -> bool {
        self.nodes += 1;
        if v == self.size {
            return true;
        }
        let ys = if v == 0 && self.fix_first { 1 } else { self.size };
        for y in 0..ys {
            let next: Vec<u64> =
                (0..self.size).map(|u| masks[u] & self.allowed[(u * self.size + v) * self.size + y]).collect();
            if next.iter().all(|&m| m != 0) {
                g.push(y as u32);
                let mut next = next;
                if self.first(v + 1, &mut next, g) {
                    *masks = next;
                    return true;
                }
                g.pop();
            }
        }
        false
    }

    /// Some full `g` with nonempty masks, plus Alice's smallest admissible
    /// answers.
    fn find(&mut self) -> Option<(Vec<u32>, Vec<u32>)> {
        let mut masks = vec![u64::MAX >> (64 - self.size); self.size];
        let mut g = Vec::with_capacity(self.size);
        self.first(0, &mut masks, &mut g).then(|| (masks.iter().map(|m| m.trailing_zeros()).collect(), g))
    }

    /// Calls `leaf` with the final masks of every full `g`.
    fn each(&mut self, v: usize, masks: &[u64], leaf: &mut impl FnMut(&[u64])) {
        self.nodes += 1;
        if v == self.size {
            leaf(masks);
            return;
        }
        let ys = if v == 0 && self.fix_first { 1 } else { self.size };
        for y in 0..ys {
            let next: Vec<u64> =
                (0..self.size).map(|u| masks[u] & self.allowed[(u * self.size + v) * self.size + y]).collect();
            if next.iter().all(|&m| m != 0) {
                self.each(v + 1, &next, leaf);
            }
        }
    }
}

/// Outcome of the exhaustive search for the least worst-case loss count.
#[derive(Clone, Debug)]
pub struct MinWorstLoss {
    pub n: u32,
    /// `min over strategies of max over inputs of rounds lost`.
    pub min_worst: u32,
    /// A strategy attaining `min_worst`.
    pub witness: LocalDetStrategy,
    /// Search nodes for the whole run (all thresholds).
    pub nodes: u64,
    /// Whether `g(0) = 0` was fixed.
    pub quotient: bool,
}

/// A strategy whose worst input loses at most `t` rounds, if any.
///
/// With `fix_first_output`, only strategies with `g(0) = 0` are searched.
/// This is exhaustive up to output flips: flipping output bit `i` of both
/// parties at every input leaves every loss count unchanged, and the flips
/// can always clear `g(0)`.
pub fn strategy_losing_at_most(n: u32, t: u32, fix_first_output: bool) -> (Option<LocalDetStrategy>, u64) {
    let mut search = MaskSearch::new(n, fix_first_output, |x, y, u, v| rounds_lost_at(x, y, u, v) <= t);
    let found = search
        .find()
        .map(|(f, g)| LocalDetStrategy::binary(n, f, g).expect("search produces valid strategies"));
    (found, search.nodes)
}

pub fn min_worst_loss(n: u32, fix_first_output: bool) -> MinWorstLoss {
    let mut nodes = 0;
    for t in 0..=n {
        let (found, k) = strategy_losing_at_most(n, t, fix_first_output);
        nodes += k;
        if let Some(witness) = found {
            return MinWorstLoss { n, min_worst: t, witness, nodes, quotient: fix_first_output };
        }
    }
    unreachable!("every strategy loses at most n rounds")
}

/// Histogram of worst-case loss counts over every strategy pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorstLossCensus {
    pub n: u32,
    pub strategies: u64,
    /// `histogram[k]`: strategies whose worst input loses exactly `k` rounds.
    pub histogram: Vec<u64>,
    /// Smallest strategy (in enumeration order) with the least worst count.
    pub witness: LocalDetStrategy,
}

impl WorstLossCensus {
    pub fn min_worst(&self) -> u32 {
        self.histogram.iter().position(|&c| c > 0).unwrap_or(0) as u32
    }
}

pub fn worst_loss_census(n: u32) -> Result<WorstLossCensus, StrategyError> {
    let mut histogram = vec![0u64; n as usize + 1];
    let mut strategies = 0;
    let mut witness: Option<(u32, LocalDetStrategy)> = None;
    for s in StrategyIter::new(crate::boxes::Dims::binary(n), DEFAULT_BUDGET)? {
        let w = s.worst_input().2;
        histogram[w as usize] += 1;
        strategies += 1;
        if witness.as_ref().is_none_or(|(best, _)| w < *best) {
            witness = Some((w, s));
        }
    }
    let witness = witness.expect("at least one strategy").1;
    Ok(WorstLossCensus { n, strategies, histogram, witness })
}

/// Result of uniform random sampling of strategy pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleReport {
    pub n: u32,
    pub seed: u64,
    pub samples: u64,
    /// `⌈n/2⌉`.
    pub threshold: u32,
    /// Samples whose worst input loses fewer than `threshold` rounds.
    pub violations: u64,
    pub min_worst: u32,
}

pub fn sample_worst_loss(n: u32, samples: u64, seed: u64) -> SampleReport {
    let size = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let threshold = n.div_ceil(2);
    let mut violations = 0;
    let mut min_worst = n;
    let mut f = vec![0usize; size];
    let mut g = vec![0usize; size];
    for _ in 0..samples {
        f.iter_mut().for_each(|o| *o = rng.gen_range(0..size));
        g.iter_mut().for_each(|o| *o = rng.gen_range(0..size));
        let mut worst = 0;
        'outer: for u in 0..size {
            for v in 0..size {
                worst = worst.max(rounds_lost_at(f[u], g[v], u, v));
                if worst == n {
                    break 'outer;
                }
            }
        }
        if worst < threshold {
            violations += 1;
        }
        min_worst = min_worst.min(worst);
    }
    SampleReport { n, seed, samples, threshold, violations, min_worst }
}

/// Counts for the all-rounds-lost property against the maximally biased
/// box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiasedLossReport {
    pub n: u32,
    /// Strategies touching no zero cell of the biased table.
    pub feasible: u128,
    /// Feasible strategies that never lose all `n` rounds.
    pub feasible_never_all_lost: u128,
}

fn biased_cell_nonzero(x: usize, y: usize, u: usize, v: usize) -> bool {
    let (x, y, both) = (x & 1, y & 1, u & v & 1);
    if both == 1 {
        x != y
    } else {
        !(x == 1 && y == 0)
    }
}

fn biased_nonzero(n: u32, x: usize, y: usize, u: usize, v: usize) -> bool {
    (0..n).all(|i| biased_cell_nonzero(x >> i, y >> i, u >> i, v >> i))
}

/// Exhaustive over all strategies (feasible ones are enumerated through
/// Bob's function with Alice's choices counted per input).
pub fn biased_all_lost_check(n: u32) -> BiasedLossReport {
    let mut feasible = MaskSearch::new(n, false, |x, y, u, v| biased_nonzero(n, x, y, u, v));
    let size = feasible.size;
    let all = u64::MAX >> (64 - size);
    let not_all_lost: Vec<u64> = (0..size * size * size)
        .map(|i| {
            let (u, v, y) = (i / (size * size), (i / size) % size, i % size);
            (0..size).filter(|&x| rounds_lost_at(x, y, u, v) < n).fold(0, |m, x| m | 1 << x)
        })
        .collect();
    let mut total = 0u128;
    let mut bad = 0u128;
    let mut leaf = |masks: &[u64]| {
        total += masks.iter().map(|m| m.count_ones() as u128).product::<u128>();
    };
    feasible.each(0, &vec![all; size], &mut leaf);
    let mut combined = MaskSearch::new(n, false, |x, y, u, v| {
        biased_nonzero(n, x, y, u, v) && not_all_lost[(u * size + v) * size + y] >> x & 1 == 1
    });
    combined.each(0, &vec![all; size], &mut |masks: &[u64]| {
        bad += masks.iter().map(|m| m.count_ones() as u128).product::<u128>();
    });
    BiasedLossReport { n, feasible: total, feasible_never_all_lost: bad }
}

/// Draws a uniformly random strategy for `n` binary boxes.
pub fn random_strategy(n: u32, rng: &mut impl Rng) -> LocalDetStrategy {
    let size = 1usize << n;
    let f = (0..size).map(|_| rng.gen_range(0..size as u32)).collect();
    let g = (0..size).map(|_| rng.gen_range(0..size as u32)).collect();
    LocalDetStrategy::binary(n, f, g).expect("random strategy is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::Dims;

    #[test]
    fn one_box_needs_one_loss() {
        let r = min_worst_loss(1, false);
        assert_eq!(r.min_worst, 1);
        assert!(r.witness.worst_input().2 == 1);
    }

    #[test]
    fn mask_search_matches_census_for_two_boxes() {
        let census = worst_loss_census(2).unwrap();
        assert_eq!(census.strategies, 65_536);
        assert_eq!(census.histogram[0], 0);
        assert_eq!(min_worst_loss(2, false).min_worst, census.min_worst());
        assert_eq!(min_worst_loss(2, true).min_worst, census.min_worst());
        assert_eq!(census.witness.worst_input().2, 1);
    }

    #[test]
    fn quotient_witness_has_zero_first_output() {
        let r = min_worst_loss(2, true);
        assert_eq!(r.witness.g()[0], 0);
        assert_eq!(r.witness.worst_input().2, r.min_worst);
    }

    #[test]
    fn sampling_is_seeded() {
        assert_eq!(sample_worst_loss(2, 500, 7), sample_worst_loss(2, 500, 7));
        assert_eq!(sample_worst_loss(2, 500, 7).violations, 0);
    }

    #[test]
    fn biased_counts_match_brute_force_for_one_box() {
        let r = biased_all_lost_check(1);
        let strategies: Vec<_> = StrategyIter::new(Dims::binary(1), DEFAULT_BUDGET).unwrap().collect();
        let feasible: Vec<_> = strategies.iter().filter(|s| s.biased_feasible()).collect();
        assert_eq!(r.feasible, feasible.len() as u128);
        let never = feasible.iter().filter(|s| s.worst_input().2 < 1).count();
        assert_eq!(r.feasible_never_all_lost, never as u128);
    }

    #[test]
    fn biased_counts_match_brute_force_for_two_boxes() {
        let r = biased_all_lost_check(2);
        let mut feasible = 0u128;
        let mut never = 0u128;
        for s in StrategyIter::new(Dims::binary(2), DEFAULT_BUDGET).unwrap() {
            if s.biased_feasible() {
                feasible += 1;
                if s.worst_input().2 < 2 {
                    never += 1;
                }
            }
        }
        assert_eq!((r.feasible, r.feasible_never_all_lost), (feasible, never));
    }
}
