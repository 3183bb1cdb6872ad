use crate::boxes::{BoxTable, Dims};

use super::LocalDetStrategy;

/// A local relabeling of inputs and outputs: `u ↦ pu[u]`, `v ↦ pv[v]`,
/// `x ↦ px[u][x]`, `y ↦ py[v][y]`. Output maps may depend on the party's
/// own input.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalRelabeling {
    dims: Dims,
    pu: Vec<usize>,
    pv: Vec<usize>,
    px: Vec<Vec<usize>>,
    py: Vec<Vec<usize>>,
}

impl LocalRelabeling {
    /// Returns `None` unless every map is a permutation.
    pub fn new(dims: Dims, pu: Vec<usize>, pv: Vec<usize>, px: Vec<Vec<usize>>, py: Vec<Vec<usize>>) -> Option<Self> {
        let perm = |p: &[usize], n: usize| {
            let mut seen = vec![false; n];
            p.len() == n && p.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
        };
        let ok = perm(&pu, dims.inputs[0])
            && perm(&pv, dims.inputs[1])
            && px.len() == dims.inputs[0]
            && py.len() == dims.inputs[1]
            && px.iter().all(|p| perm(p, dims.outputs[0]))
            && py.iter().all(|p| perm(p, dims.outputs[1]));
        ok.then_some(LocalRelabeling { dims, pu, pv, px, py })
    }

    pub fn identity(dims: Dims) -> Self {
        let id = |n: usize| (0..n).collect::<Vec<_>>();
        LocalRelabeling {
            dims,
            pu: id(dims.inputs[0]),
            pv: id(dims.inputs[1]),
            px: vec![id(dims.outputs[0]); dims.inputs[0]],
            py: vec![id(dims.outputs[1]); dims.inputs[1]],
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_identity(&self) -> bool {
        *self == LocalRelabeling::identity(self.dims)
    }

    #[inline]
    pub fn apply_coords(&self, x: usize, y: usize, u: usize, v: usize) -> (usize, usize, usize, usize) {
        (self.px[u][x], self.py[v][y], self.pu[u], self.pv[v])
    }

    #[inline]
    pub fn apply_cell(&self, cell: usize) -> usize {
        let (x, y, u, v) = self.dims.cell_coords(cell);
        let (x, y, u, v) = self.apply_coords(x, y, u, v);
        self.dims.cell_index(x, y, u, v)
    }

    /// The image strategy covers exactly the image cells.
    pub fn apply_strategy(&self, s: &LocalDetStrategy) -> LocalDetStrategy {
        let mut f = vec![0u32; self.dims.inputs[0]];
        let mut g = vec![0u32; self.dims.inputs[1]];
        for (u, &x) in s.f().iter().enumerate() {
            f[self.pu[u]] = self.px[u][x as usize] as u32;
        }
        for (v, &y) in s.g().iter().enumerate() {
            g[self.pv[v]] = self.py[v][y as usize] as u32;
        }
        LocalDetStrategy::new_unchecked(self.dims, f, g)
    }

    /// `P'(image of c) = P(c)`.
    pub fn apply_box(&self, b: &BoxTable) -> BoxTable {
        let mut table = b.table().to_vec();
        for (c, entry) in b.table().iter().enumerate() {
            table[self.apply_cell(c)] = entry.clone();
        }
        BoxTable::unchecked(self.dims, table)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &LocalRelabeling) -> LocalRelabeling {
        let d = self.dims;
        LocalRelabeling {
            dims: d,
            pu: other.pu.iter().map(|&u| self.pu[u]).collect(),
            pv: other.pv.iter().map(|&v| self.pv[v]).collect(),
            px: (0..d.inputs[0]).map(|u| other.px[u].iter().map(|&x| self.px[other.pu[u]][x]).collect()).collect(),
            py: (0..d.inputs[1]).map(|v| other.py[v].iter().map(|&y| self.py[other.pv[v]][y]).collect()).collect(),
        }
    }
}

/// Depolarization element on `n` binary boxes: per box a triple
/// `(α, β, b)`, stored as bitmasks with box 1 in the most significant bit.
///
/// On one box it maps `(x, y, u, v)` to
/// `(x ⊕ βu ⊕ b, y ⊕ αv ⊕ b ⊕ αβ, u ⊕ α, v ⊕ β)`, which permutes the cells
/// of the PR box among themselves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DepolElement {
    pub n: u32,
    pub alpha: u32,
    pub beta: u32,
    pub flip: u32,
}

impl DepolElement {
    pub fn new(n: u32, alpha: u32, beta: u32, flip: u32) -> Self {
        let mask = (1u32 << n) - 1;
        DepolElement { n, alpha: alpha & mask, beta: beta & mask, flip: flip & mask }
    }

    /// Element acting as `(α, β, b)` on box `round` (0-based) and trivially
    /// elsewhere.
    pub fn single(n: u32, round: u32, alpha: bool, beta: bool, flip: bool) -> Self {
        let bit = 1u32 << (n - 1 - round);
        DepolElement::new(n, if alpha { bit } else { 0 }, if beta { bit } else { 0 }, if flip { bit } else { 0 })
    }

    #[inline]
    pub fn apply_coords(&self, x: usize, y: usize, u: usize, v: usize) -> (usize, usize, usize, usize) {
        let (a, b, c) = (self.alpha as usize, self.beta as usize, self.flip as usize);
        (x ^ (b & u) ^ c, y ^ (a & v) ^ c ^ (a & b), u ^ a, v ^ b)
    }

    pub fn apply_strategy(&self, s: &LocalDetStrategy) -> LocalDetStrategy {
        let size = 1usize << self.n;
        let (a, b, c) = (self.alpha as usize, self.beta as usize, self.flip as usize);
        let mut f = vec![0u32; size];
        let mut g = vec![0u32; size];
        for u in 0..size {
            f[u ^ a] = (s.f()[u] as usize ^ (b & u) ^ c) as u32;
        }
        for v in 0..size {
            g[v ^ b] = (s.g()[v] as usize ^ (a & v) ^ c ^ (a & b)) as u32;
        }
        LocalDetStrategy::new_unchecked(s.dims(), f, g)
    }

    pub fn to_relabeling(&self) -> LocalRelabeling {
        let size = 1usize << self.n;
        let (a, b, c) = (self.alpha as usize, self.beta as usize, self.flip as usize);
        LocalRelabeling {
            dims: Dims::binary(self.n),
            pu: (0..size).map(|u| u ^ a).collect(),
            pv: (0..size).map(|v| v ^ b).collect(),
            px: (0..size).map(|u| (0..size).map(|x| x ^ (b & u) ^ c).collect()).collect(),
            py: (0..size).map(|v| (0..size).map(|y| y ^ (a & v) ^ c ^ (a & b)).collect()).collect(),
        }
    }

    pub fn apply_box(&self, b: &BoxTable) -> BoxTable {
        self.to_relabeling().apply_box(b)
    }
}

/// Human-readable statement of the group action, for logs.
pub const DEPOL_DEFINITION: &str = "depolarization group: (a, b, c) in ({0,1}^n)^3 acting bitwise per box as \
(x, y, u, v) -> (x ^ (b & u) ^ c, y ^ (a & v) ^ c ^ (a & b), u ^ a, v ^ b); 8^n elements, box 1 is the most significant bit";

/// All `8^n` depolarization elements, ordered by `(α, β, b)`.
pub fn depol_group(n: u32) -> Vec<DepolElement> {
    let size = 1u32 << n;
    let mut out = Vec::with_capacity((size * size * size) as usize);
    for alpha in 0..size {
        for beta in 0..size {
            for flip in 0..size {
                out.push(DepolElement::new(n, alpha, beta, flip));
            }
        }
    }
    out
}

/// Image of `s` under every group element, in [`depol_group`] order.
/// Points with a nontrivial stabilizer appear more than once; a uniform
/// mixture over this list is the depolarized box.
pub fn depol_images(s: &LocalDetStrategy) -> Vec<LocalDetStrategy> {
    let n = s.dims().rounds().expect("depolarization acts on binary boxes");
    depol_group(n).iter().map(|e| e.apply_strategy(s)).collect()
}

/// Distinct points of the depolarization orbit, sorted.
pub fn orbit(s: &LocalDetStrategy) -> Vec<LocalDetStrategy> {
    let mut out = depol_images(s);
    out.sort();
    out.dedup();
    out
}

fn swap_bits(w: usize, p: u32, q: u32) -> usize {
    let (bp, bq) = ((w >> p) & 1, (w >> q) & 1);
    if bp == bq {
        w
    } else {
        w ^ (1 << p) ^ (1 << q)
    }
}

/// Exchanges boxes `round` and `round + 1` in every letter.
pub fn round_transposition(n: u32, round: u32) -> LocalRelabeling {
    assert!(round + 1 < n, "transposition needs two boxes");
    let (p, q) = (n - 1 - round, n - 2 - round);
    let size = 1usize << n;
    let sw = |w: usize| swap_bits(w, p, q);
    LocalRelabeling {
        dims: Dims::binary(n),
        pu: (0..size).map(sw).collect(),
        pv: (0..size).map(sw).collect(),
        px: vec![(0..size).map(sw).collect(); size],
        py: vec![(0..size).map(sw).collect(); size],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{Scalar, Var};
    use std::collections::BTreeSet;

    #[test]
    fn depol_fixes_pr_and_isotropic_boxes() {
        let eps = Scalar::var(Var::Eps);
        for n in 1..=2 {
            let pr = BoxTable::pr(n);
            let iso = BoxTable::isotropic(n, &eps).unwrap();
            for e in depol_group(n) {
                assert_eq!(e.apply_box(&pr), pr);
                assert_eq!(e.apply_box(&iso), iso);
            }
        }
    }

    #[test]
    fn relabeling_matches_direct_action() {
        let s = LocalDetStrategy::parse_binary("[0 0 0 1; 0 0 2 0]").unwrap();
        for e in depol_group(2) {
            assert_eq!(e.to_relabeling().apply_strategy(&s), e.apply_strategy(&s));
        }
    }

    #[test]
    fn strategy_action_commutes_with_box_action() {
        let s = LocalDetStrategy::parse_binary("[0 1 3 2; 1 0 2 2]").unwrap();
        for e in depol_group(2).into_iter().step_by(7) {
            let lhs = BoxTable::deterministic(&e.apply_strategy(&s));
            let rhs = e.apply_box(&BoxTable::deterministic(&s));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn group_is_closed() {
        let g: BTreeSet<_> = depol_group(1).iter().map(|e| e.to_relabeling().pu.clone()).collect();
        assert_eq!(g.len(), 2);
        let rel: Vec<_> = depol_group(1).iter().map(DepolElement::to_relabeling).collect();
        for a in &rel {
            for b in &rel {
                assert!(rel.contains(&a.compose(b)));
            }
        }
    }

    #[test]
    fn constant_zero_orbit_is_eq3_list() {
        let zero = LocalDetStrategy::parse_binary("[0 0; 0 0]").unwrap();
        let orbit: BTreeSet<String> = depol_group(1).iter().map(|e| e.apply_strategy(&zero).to_string()).collect();
        let expected: BTreeSet<String> = [
            "[0 0; 0 0]", "[0 0; 0 1]", "[0 1; 0 0]", "[1 0; 0 1]",
            "[0 1; 1 0]", "[1 1; 1 0]", "[1 0; 1 1]", "[1 1; 1 1]",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        assert_eq!(orbit, expected);
    }

    #[test]
    fn pl_point_has_a_stabilizer() {
        let d = LocalDetStrategy::parse_binary("[0 0 0 1; 0 0 2 0]").unwrap();
        assert_eq!(depol_images(&d).len(), 64);
        assert_eq!(orbit(&d).len(), 32);
        let stab: Vec<_> = depol_group(2).into_iter().filter(|e| e.apply_strategy(&d) == d).collect();
        assert_eq!(stab, vec![DepolElement::new(2, 0, 0, 0), DepolElement::new(2, 0b10, 0b01, 0)]);
        let generic = LocalDetStrategy::parse_binary("[0 1; 1 1]").unwrap();
        assert_eq!(orbit(&generic).len(), 8);
    }

    #[test]
    fn transposition_swaps_boxes() {
        let t = round_transposition(2, 0);
        assert_eq!(t.apply_coords(0b01, 0b10, 0b01, 0b11), (0b10, 0b01, 0b10, 0b11));
        assert!(t.compose(&t).is_identity());
    }
}
