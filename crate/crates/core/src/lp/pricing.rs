//! Exact pricing: find the strategies minimizing `Σ_{u,v} w(f(u), g(v), u, v)`.
//!
//! Bob's function is enumerated digit by digit with running sums
//! `S[u][x] = Σ_{v assigned} w(x, g(v), u, v)`; for each complete `g`,
//! Alice's best answer at `u` is `argmin_x S[u][x]`. Forbidden cells prune
//! a branch as soon as some `u` has no admissible `x` left. Work is split
//! into fixed prefixes of `g`, so the result does not depend on the number
//! of threads.

use rayon::prelude::*;

use crate::boxes::Dims;
use crate::strategies::LocalDetStrategy;

/// Outputs per party must fit a `u64` mask.
pub const MAX_OUTPUTS: usize = 64;

/// Prefixes are chosen so that there are at least this many work items.
const MIN_CHUNKS: usize = 64;

/// A priced strategy and its weighted sum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Priced {
    pub sum: i128,
    pub strategy: LocalDetStrategy,
}

/// Pricing instance over integer cell weights.
pub struct Pricer {
    dims: Dims,
    /// `w[((v * oy + y) * iu + u) * ox + x]`.
    w: Vec<i128>,
    /// `allowed[(v * oy + y) * iu + u]`: admissible `x` bits.
    allowed: Vec<u64>,
    fix_first: bool,
}

struct Frame {
    sums: Vec<i128>,
    masks: Vec<u64>,
}

struct TopK {
    keep: usize,
    below: Option<i128>,
    items: Vec<Priced>,
}

impl TopK {
    fn new(keep: usize, below: Option<i128>) -> Self {
        TopK { keep, below, items: Vec::with_capacity(keep + 1) }
    }

    fn wants(&self, sum: i128) -> bool {
        if self.below.is_some_and(|b| sum >= b) {
            return false;
        }
        self.items.len() < self.keep || self.items.last().is_some_and(|w| sum <= w.sum)
    }

    fn offer(&mut self, p: Priced) {
        let pos = self.items.partition_point(|q| q < &p);
        if pos >= self.keep || self.items.get(pos) == Some(&p) {
            return;
        }
        self.items.insert(pos, p);
        self.items.truncate(self.keep);
    }

    fn merge(mut self, other: TopK) -> TopK {
        for p in other.items {
            self.offer(p);
        }
        self
    }
}

impl Pricer {
    /// `weights` and `forbidden` are indexed by cell. With `fix_first`,
    /// only strategies with `g(0) = 0` are searched; the caller must know
    /// the objective is invariant under the output flips that make this
    /// exhaustive.
    pub fn new(dims: Dims, weights: &[i128], forbidden: &[bool], fix_first: bool) -> Self {
        let [iu, iv] = dims.inputs;
        let [ox, oy] = dims.outputs;
        assert!(ox <= MAX_OUTPUTS && oy <= MAX_OUTPUTS, "too many outputs for mask pricing");
        assert_eq!(weights.len(), dims.cells());
        let mut w = vec![0i128; iv * oy * iu * ox];
        let mut allowed = vec![0u64; iv * oy * iu];
        for v in 0..iv {
            for y in 0..oy {
                for u in 0..iu {
                    let base = (v * oy + y) * iu + u;
                    for x in 0..ox {
                        let c = dims.cell_index(x, y, u, v);
                        w[base * ox + x] = weights[c];
                        if !forbidden[c] {
                            allowed[base] |= 1 << x;
                        }
                    }
                }
            }
        }
        Pricer { dims, w, allowed, fix_first }
    }

    fn choices(&self, v: usize) -> usize {
        if v == 0 && self.fix_first {
            1
        } else {
            self.dims.outputs[1]
        }
    }

    /// Applies digit `g(v) = y` to `from`, writing into `to`; false if some
    /// `u` is left without an admissible output.
    fn step(&self, from: &Frame, to: &mut Frame, v: usize, y: usize) -> bool {
        let [iu, _] = self.dims.inputs;
        let ox = self.dims.outputs[0];
        let base = (v * self.dims.outputs[1] + y) * iu;
        for u in 0..iu {
            let m = from.masks[u] & self.allowed[base + u];
            if m == 0 {
                return false;
            }
            to.masks[u] = m;
        }
        let w = &self.w[base * ox..(base + iu) * ox];
        for (t, (f, d)) in to.sums.iter_mut().zip(from.sums.iter().zip(w)) {
            *t = f + d;
        }
        true
    }

    fn leaf(&self, frame: &Frame, g: &[u32], top: &mut TopK) {
        let [iu, _] = self.dims.inputs;
        let ox = self.dims.outputs[0];
        let mut total = 0i128;
        for u in 0..iu {
            let row = &frame.sums[u * ox..(u + 1) * ox];
            let mut m = frame.masks[u];
            let mut best = i128::MAX;
            while m != 0 {
                let x = m.trailing_zeros() as usize;
                m &= m - 1;
                best = best.min(row[x]);
            }
            total += best;
        }
        if !top.wants(total) {
            return;
        }
        let f = (0..iu)
            .map(|u| {
                let row = &frame.sums[u * ox..(u + 1) * ox];
                let mut m = frame.masks[u];
                let mut arg = (i128::MAX, 0u32);
                while m != 0 {
                    let x = m.trailing_zeros();
                    m &= m - 1;
                    if row[x as usize] < arg.0 {
                        arg = (row[x as usize], x);
                    }
                }
                arg.1
            })
            .collect();
        top.offer(Priced { sum: total, strategy: LocalDetStrategy::new_unchecked(self.dims, f, g.to_vec()) });
    }

    fn dfs(&self, frames: &mut [Frame], v: usize, g: &mut Vec<u32>, top: &mut TopK) {
        let iv = self.dims.inputs[1];
        if v == iv {
            self.leaf(&frames[v], g, top);
            return;
        }
        for y in 0..self.choices(v) {
            let (head, tail) = frames.split_at_mut(v + 1);
            if self.step(&head[v], &mut tail[0], v, y) {
                g.push(y as u32);
                self.dfs(frames, v + 1, g, top);
                g.pop();
            }
        }
    }

    fn prefixes(&self) -> Vec<Vec<u32>> {
        let iv = self.dims.inputs[1];
        let mut out: Vec<Vec<u32>> = vec![Vec::new()];
        let mut v = 0;
        while v < iv && out.len() < MIN_CHUNKS {
            let k = self.choices(v);
            out = out.into_iter().flat_map(|p| (0..k as u32).map(move |y| [p.as_slice(), &[y]].concat())).collect();
            v += 1;
        }
        out
    }

    fn frames(&self) -> Vec<Frame> {
        let [iu, iv] = self.dims.inputs;
        let ox = self.dims.outputs[0];
        let full = if ox == 64 { u64::MAX } else { (1u64 << ox) - 1 };
        (0..=iv).map(|_| Frame { sums: vec![0; iu * ox], masks: vec![full; iu] }).collect()
    }

    fn run_prefix(&self, prefix: &[u32], keep: usize, below: Option<i128>) -> TopK {
        let mut top = TopK::new(keep, below);
        let mut frames = self.frames();
        for (v, &y) in prefix.iter().enumerate() {
            let (head, tail) = frames.split_at_mut(v + 1);
            if !self.step(&head[v], &mut tail[0], v, y as usize) {
                return top;
            }
        }
        let mut g = prefix.to_vec();
        self.dfs(&mut frames, prefix.len(), &mut g, &mut top);
        top
    }

    /// The `keep` smallest sums (ties by strategy order), restricted to
    /// sums strictly below `below` when given. One strategy per `g`.
    pub fn best(&self, keep: usize, below: Option<i128>) -> Vec<Priced> {
        if keep == 0 {
            return Vec::new();
        }
        let tops: Vec<TopK> = self.prefixes().par_iter().map(|p| self.run_prefix(p, keep, below)).collect();
        tops.into_iter().fold(TopK::new(keep, below), TopK::merge).items
    }
}

/// Convenience wrapper around [`Pricer::best`].
pub fn price(dims: Dims, weights: &[i128], forbidden: &[bool], fix_first: bool, keep: usize, below: Option<i128>) -> Vec<Priced> {
    Pricer::new(dims, weights, forbidden, fix_first).best(keep, below)
}
