//! Whitehead graphs, cut vertices and primitivity via Whitehead reduction.

use alloc::vec::Vec;

use crate::aut::FreeGroupAut;
use crate::class::ConjClass;
use crate::error::{Error, Result};
use crate::word::{Basis, Letter, Word};

/// Whitehead graph of a cyclic word: vertices are the `2n` symbols, one
/// edge `{u^{-1}, v}` per cyclic adjacency `uv`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhiteheadGraph {
    rank: usize,
    /// Sorted multiset of edges, each stored with the smaller end first.
    edges: Vec<(Letter, Letter)>,
}

impl WhiteheadGraph {
    pub fn of_class(alpha: &ConjClass, rank: usize) -> Result<Self> {
        if alpha.is_trivial() {
            return Err(Error::input("Whitehead graph of the trivial class"));
        }
        let c = alpha.letters();
        let m = c.len();
        let edges = (0..m).map(|i| (c[i].inverse(), c[(i + 1) % m]));
        Ok(Self::from_edges(rank, edges))
    }

    pub fn from_edges(rank: usize, edges: impl IntoIterator<Item = (Letter, Letter)>) -> Self {
        let mut edges: Vec<(Letter, Letter)> = edges
            .into_iter()
            .map(|(u, v)| if u <= v { (u, v) } else { (v, u) })
            .collect();
        edges.sort();
        WhiteheadGraph { rank, edges }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn edges(&self) -> &[(Letter, Letter)] {
        &self.edges
    }

    /// Multiplicity of edge `{u, v}`.
    pub fn multiplicity(&self, u: Letter, v: Letter) -> usize {
        let e = if u <= v { (u, v) } else { (v, u) };
        self.edges.iter().filter(|x| **x == e).count()
    }

    /// True iff the graph on all `2n` vertices is disconnected (isolated
    /// vertices count) or has an articulation vertex.
    pub fn has_cut_vertex_or_disconnected(&self) -> bool {
        let edges: Vec<(usize, usize)> =
            self.edges.iter().map(|(u, v)| (u.index(), v.index())).collect();
        cut_vertex_or_disconnected(2 * self.rank, &edges)
    }
}

/// Disconnection or articulation-point test for an undirected multigraph on
/// vertices `0..n`.
pub fn cut_vertex_or_disconnected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n <= 1 {
        return false;
    }
    let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for &(u, v) in edges {
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    // iterative DFS low-link from vertex 0
    const UNSEEN: usize = usize::MAX;
    let mut disc = alloc::vec![UNSEEN; n];
    let mut low = alloc::vec![0usize; n];
    let mut parent = alloc::vec![UNSEEN; n];
    let mut next_child = alloc::vec![0usize; n];
    let mut root_children = 0;
    let mut time = 0;
    let mut articulation = false;
    let mut stack = alloc::vec![0usize];
    disc[0] = 0;
    low[0] = 0;
    time += 1;
    while let Some(&u) = stack.last() {
        if next_child[u] < adj[u].len() {
            let v = adj[u][next_child[u]];
            next_child[u] += 1;
            if disc[v] == UNSEEN {
                parent[v] = u;
                disc[v] = time;
                low[v] = time;
                time += 1;
                if u == 0 {
                    root_children += 1;
                }
                stack.push(v);
            } else if v != parent[u] {
                low[u] = low[u].min(disc[v]);
            }
        } else {
            stack.pop();
            let p = parent[u];
            if p != UNSEEN {
                low[p] = low[p].min(low[u]);
                if p != 0 && low[u] >= disc[p] {
                    articulation = true;
                }
            }
        }
    }
    if disc.contains(&UNSEEN) {
        return true;
    }
    articulation || root_children > 1
}

/// Whitehead automorphisms of the second kind `(A, a)`: `a ∈ A`,
/// `a^{-1} ∉ A`, in a fixed deterministic enumeration (by `a` in symbol
/// order, then by subset bitmask). Trivial and inner ones are skipped.
pub fn whitehead_automorphisms(basis: &Basis) -> Vec<FreeGroupAut> {
    let rank = basis.rank();
    let mut out = Vec::new();
    for a in basis.letters() {
        let others: Vec<Letter> = basis.letters().filter(|l| l.generator() != a.generator()).collect();
        let aw = Word::from_reduced(alloc::vec![a]);
        let ainv = aw.inverse();
        for mask in 1u32..(1u32 << others.len()) - 1 {
            let in_a = |l: Letter| {
                others
                    .iter()
                    .position(|x| *x == l)
                    .is_some_and(|p| mask >> p & 1 == 1)
            };
            let images: Vec<Word> = (0..rank)
                .map(|i| {
                    let x = Letter::new(i, false);
                    let xw = Word::from_reduced(alloc::vec![x]);
                    if x.generator() == a.generator() {
                        return xw;
                    }
                    match (in_a(x), in_a(x.inverse())) {
                        (true, false) => xw.mul(&aw),
                        (false, true) => ainv.mul(&xw),
                        (true, true) => ainv.mul(&xw).mul(&aw),
                        (false, false) => xw,
                    }
                })
                .collect();
            let f = FreeGroupAut::new(images, None).expect("Whitehead images are nontrivial");
            out.push(f);
        }
    }
    out
}

/// Greedy Whitehead reduction: apply the first length-reducing Whitehead
/// automorphism until none reduces. Returns the terminal class.
pub fn whitehead_minimize(alpha: &ConjClass, basis: &Basis) -> ConjClass {
    let autos = whitehead_automorphisms(basis);
    let mut cur = alpha.clone();
    'outer: loop {
        let mut best: Option<ConjClass> = None;
        for f in &autos {
            let img = f.apply_class(&cur);
            if img.len() < cur.len() && best.as_ref().is_none_or(|b| img.len() < b.len()) {
                best = Some(img);
            }
        }
        match best {
            Some(b) => {
                cur = b;
                continue 'outer;
            }
            None => return cur,
        }
    }
}

/// True iff `α` is primitive (some representative extends to a basis).
pub fn is_primitive(alpha: &ConjClass, basis: &Basis) -> Result<bool> {
    if alpha.is_trivial() {
        return Err(Error::input("primitivity of the trivial class"));
    }
    Ok(whitehead_minimize(alpha, basis).len() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::classes_up_to;
    use alloc::collections::BTreeSet;

    fn b2() -> Basis {
        Basis::new(2).unwrap()
    }

    fn l(c: char) -> Letter {
        Letter::from_char(c).unwrap()
    }

    fn class(s: &str) -> ConjClass {
        ConjClass::parse(&b2(), s).unwrap()
    }

    #[test]
    fn whitehead_graph_examples() {
        let g = WhiteheadGraph::of_class(&class("a"), 2).unwrap();
        assert_eq!(g.edges(), &[(l('a'), l('A'))]);
        assert!(g.has_cut_vertex_or_disconnected());

        let g = WhiteheadGraph::of_class(&class("abab"), 2).unwrap();
        assert_eq!(g.edges().len(), 4);
        assert_eq!(g.multiplicity(l('A'), l('b')), 2);
        assert_eq!(g.multiplicity(l('B'), l('a')), 2);

        let g = WhiteheadGraph::of_class(&class("abAB"), 2).unwrap();
        let pairs: BTreeSet<(Letter, Letter)> = g.edges().iter().copied().collect();
        assert_eq!(pairs.len(), 4);
        assert!(!g.has_cut_vertex_or_disconnected());

        assert!(WhiteheadGraph::of_class(&ConjClass::default(), 2).is_err());
    }

    #[test]
    fn cut_vertex_examples() {
        // path on 3 vertices: the middle one cuts
        assert!(cut_vertex_or_disconnected(3, &[(0, 1), (1, 2)]));
        // 4-cycle
        assert!(!cut_vertex_or_disconnected(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]));
        // two triangles sharing a vertex
        assert!(cut_vertex_or_disconnected(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]));
        // isolated vertex
        assert!(cut_vertex_or_disconnected(4, &[(0, 1), (1, 2), (2, 0)]));
        // K4 with doubled edges
        assert!(!cut_vertex_or_disconnected(
            4,
            &[(0, 1), (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        ));
    }

    #[test]
    fn primitivity_examples() {
        let b = b2();
        assert!(is_primitive(&class("a"), &b).unwrap());
        assert!(is_primitive(&class("ab"), &b).unwrap());
        assert!(is_primitive(&class("aab"), &b).unwrap());
        assert!(!is_primitive(&class("aa"), &b).unwrap());
        assert!(!is_primitive(&class("abAB"), &b).unwrap());
        assert!(!is_primitive(&class("aabb"), &b).unwrap());
        assert!(is_primitive(&ConjClass::default(), &b).is_err());
    }

    #[test]
    fn whitehead_automorphisms_count() {
        // rank 2: 4 choices of a, 2^2 - 2 nontrivial, non-inner subsets
        assert_eq!(whitehead_automorphisms(&b2()).len(), 8);
        for f in whitehead_automorphisms(&b2()) {
            assert!(f.is_inner().is_none());
        }
    }

    /// Orbit search by Whitehead moves (both kinds) never exceeding the
    /// initial length; independent of the greedy descent.
    fn primitive_by_orbit_search(alpha: &ConjClass, basis: &Basis) -> bool {
        let mut moves = whitehead_automorphisms(basis);
        // Whitehead automorphisms of the first kind for rank 2
        for (x, y) in [("b", "a"), ("A", "b"), ("a", "B"), ("B", "A")] {
            moves.push(FreeGroupAut::parse(2, &[x, y], None).unwrap());
        }
        let limit = alpha.len();
        let mut seen = BTreeSet::new();
        let mut queue = alloc::vec![alpha.clone()];
        seen.insert(alpha.clone());
        while let Some(c) = queue.pop() {
            if c.len() == 1 {
                return true;
            }
            for f in &moves {
                let img = f.apply_class(&c);
                if img.len() <= limit && seen.insert(img.clone()) {
                    queue.push(img);
                }
            }
        }
        false
    }

    #[test]
    fn primitivity_matches_orbit_search_up_to_length_4() {
        let b = b2();
        let mut primitive = 0;
        for c in classes_up_to(&b, 4) {
            let fast = is_primitive(&c, &b).unwrap();
            assert_eq!(fast, primitive_by_orbit_search(&c, &b), "class {c}");
            primitive += fast as usize;
        }
        assert!(primitive > 0);
    }
}
