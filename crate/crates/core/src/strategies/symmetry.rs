use std::collections::{BTreeSet, VecDeque};

use crate::boxes::Dims;
use crate::numeric::Rational;

use super::{round_transposition, DepolElement, LocalDetStrategy, LocalRelabeling};

/// A group of cell relabelings given by generators, used to shrink the
/// master problem of column generation.
#[derive(Clone, Debug)]
pub struct CellSymmetry {
    dims: Dims,
    generators: Vec<LocalRelabeling>,
    output_flips: bool,
}

fn flip_generators(n: u32) -> Vec<LocalRelabeling> {
    (0..n).map(|i| DepolElement::single(n, i, false, false, true).to_relabeling()).collect()
}

impl CellSymmetry {
    pub fn trivial(dims: Dims) -> Self {
        CellSymmetry { dims, generators: Vec::new(), output_flips: false }
    }

    pub fn new(dims: Dims, generators: Vec<LocalRelabeling>) -> Self {
        let generators: Vec<_> = generators.into_iter().filter(|g| !g.is_identity()).collect();
        let output_flips = match dims.rounds() {
            Some(n) if n > 0 => flip_generators(n).iter().all(|f| generators.contains(f)),
            _ => false,
        };
        CellSymmetry { dims, generators, output_flips }
    }

    /// Single-box depolarization moves and adjacent box swaps for `n`
    /// binary boxes.
    pub fn candidates(n: u32) -> Vec<LocalRelabeling> {
        let mut out = Vec::new();
        for i in 0..n {
            for (a, b, c) in [(true, false, false), (false, true, false), (false, false, true)] {
                out.push(DepolElement::single(n, i, a, b, c).to_relabeling());
            }
        }
        for i in 0..n.saturating_sub(1) {
            out.push(round_transposition(n, i));
        }
        out
    }

    /// Keeps the candidates under which `rhs` is invariant.
    pub fn detect(dims: Dims, rhs: &[Rational]) -> Self {
        let Some(n) = dims.rounds() else { return CellSymmetry::trivial(dims) };
        let kept = CellSymmetry::candidates(n)
            .into_iter()
            .filter(|g| (0..rhs.len()).all(|c| rhs[g.apply_cell(c)] == rhs[c]))
            .collect();
        CellSymmetry::new(dims, kept)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn generators(&self) -> &[LocalRelabeling] {
        &self.generators
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    /// Whether every per-box output flip `(x_i, y_i) ↦ (x_i ⊕ 1, y_i ⊕ 1)`
    /// is in the group. Invariant pricing problems may then fix `g(0) = 0`.
    pub fn has_output_flips(&self) -> bool {
        self.output_flips
    }

    /// Class id of every cell, numbered in order of first appearance.
    pub fn cell_classes(&self) -> (Vec<usize>, usize) {
        let cells = self.dims.cells();
        let mut parent: Vec<usize> = (0..cells).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for g in &self.generators {
            for c in 0..cells {
                let (a, b) = (find(&mut parent, c), find(&mut parent, g.apply_cell(c)));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut id = vec![usize::MAX; cells];
        let mut class = vec![0; cells];
        let mut count = 0;
        for c in 0..cells {
            let r = find(&mut parent, c);
            if id[r] == usize::MAX {
                id[r] = count;
                count += 1;
            }
            class[c] = id[r];
        }
        (class, count)
    }

    /// The orbit of a strategy, sorted.
    pub fn orbit(&self, s: &LocalDetStrategy) -> Vec<LocalDetStrategy> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(s.clone());
        queue.push_back(s.clone());
        while let Some(t) = queue.pop_front() {
            for g in &self.generators {
                let img = g.apply_strategy(&t);
                if !seen.contains(&img) {
                    seen.insert(img.clone());
                    queue.push_back(img);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Smallest orbit member.
    pub fn canonical(&self, s: &LocalDetStrategy) -> LocalDetStrategy {
        self.orbit(s).swap_remove(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::BoxTable;
    use crate::numeric::Scalar;

    #[test]
    fn isotropic_box_classes_follow_round_losses() {
        for n in 1..=3 {
            let b = BoxTable::isotropic(n, &Scalar::frac(1, 8)).unwrap();
            let rhs = b.rationals().unwrap();
            let sym = CellSymmetry::detect(b.dims(), &rhs);
            assert_eq!(sym.generators().len() as u32, 3 * n + n - 1);
            assert!(sym.has_output_flips());
            assert_eq!(sym.cell_classes().1, n as usize + 1);
        }
    }

    #[test]
    fn generated_orbits_match_the_depolarization_group() {
        let sym = CellSymmetry::new(Dims::binary(2), CellSymmetry::candidates(2)[..6].to_vec());
        for t in ["[0 0 0 1; 0 0 2 0]", "[0 0 0 1; 0 0 0 2]", "[0 0 0 0; 0 0 0 0]"] {
            let s = LocalDetStrategy::parse_binary(t).unwrap();
            assert_eq!(sym.orbit(&s), super::super::orbit(&s), "{t}");
        }
    }

    #[test]
    fn canonical_is_orbit_invariant() {
        let sym = CellSymmetry::new(Dims::binary(2), CellSymmetry::candidates(2));
        let s = LocalDetStrategy::parse_binary("[0 1 3 2; 1 0 2 2]").unwrap();
        let c = sym.canonical(&s);
        for t in sym.orbit(&s).iter().step_by(5) {
            assert_eq!(sym.canonical(t), c);
        }
    }

    #[test]
    fn biased_box_keeps_only_box_swaps() {
        let b = BoxTable::biased(2, &Scalar::frac(1, 5)).unwrap();
        let sym = CellSymmetry::detect(b.dims(), &b.rationals().unwrap());
        assert_eq!(sym.generators(), &[round_transposition(2, 0)]);
        assert!(!sym.has_output_flips());
    }
}
