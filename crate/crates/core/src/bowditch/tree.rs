//! Finite trees with points at the leaves, one annulus per directed edge.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::system::{Annulus, AnnulusLabel, AnnulusSystem};
use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// A finite tree; sample points are its leaves in increasing vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeModel {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    leaves: Vec<usize>,
}

impl TreeModel {
    /// Builds a tree from an edge list on vertices `0..n`. Degree-2 vertices
    /// are rejected: they split one geometric edge into two annuli.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n < 2 || edges.len() + 1 != n {
            return Err(Error::input("a tree on n vertices has n - 1 edges"));
        }
        let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::input(alloc::format!("bad edge ({u}, {v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let model = TreeModel { adj, edges: edges.to_vec(), leaves: Vec::new() };
        if model.distances_from(0).contains(&usize::MAX) {
            return Err(Error::input("edge list is not connected"));
        }
        if let Some(v) = (0..n).find(|&v| model.adj[v].len() == 2) {
            return Err(Error::input(alloc::format!("vertex {v} has degree 2")));
        }
        let leaves = (0..n).filter(|&v| model.adj[v].len() == 1).collect();
        Ok(TreeModel { leaves, ..model })
    }

    /// The caterpillar with `n >= 3` leaves: a spine of `n - 2` vertices,
    /// two leaves at each end and one at each interior spine vertex.
    pub fn caterpillar(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::input("caterpillar needs at least 3 leaves"));
        }
        let spine = n - 2;
        let mut edges: Vec<(usize, usize)> = (1..spine).map(|i| (i - 1, i)).collect();
        let mut next = spine;
        for s in 0..spine {
            let hang = if spine == 1 {
                3
            } else if s == 0 || s == spine - 1 {
                2
            } else {
                1
            };
            for _ in 0..hang {
                edges.push((s, next));
                next += 1;
            }
        }
        Self::new(next, &edges)
    }

    pub fn star(leaves: usize) -> Result<Self> {
        let edges: Vec<(usize, usize)> = (1..=leaves).map(|i| (0, i)).collect();
        Self::new(leaves + 1, &edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Vertex ids of the sample points; point `i` is `leaves()[i]`.
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn num_points(&self) -> usize {
        self.leaves.len()
    }

    pub fn distances_from(&self, s: usize) -> Vec<usize> {
        let mut dist = alloc::vec![usize::MAX; self.adj.len()];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
            }
        }
        dist
    }

    /// Leaves on the `v` side of the edge `u–v`, as a set of point indices.
    fn side(&self, u: usize, v: usize) -> BitSet {
        let mut seen = alloc::vec![false; self.adj.len()];
        seen[u] = true;
        seen[v] = true;
        let mut stack = alloc::vec![v];
        let mut out = BitSet::new(self.leaves.len());
        while let Some(x) = stack.pop() {
            if let Ok(i) = self.leaves.binary_search(&x) {
                out.insert(i);
            }
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        out
    }

    /// One annulus per directed edge `u → v`: minus side behind `u`, plus
    /// side beyond `v`.
    pub fn system(&self) -> Result<AnnulusSystem> {
        let mut annuli = Vec::with_capacity(2 * self.edges.len());
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            let a = self.side(v, u);
            let b = self.side(u, v);
            annuli.push(Annulus {
                minus: a.clone(),
                plus: b.clone(),
                label: AnnulusLabel { base: i, negated: false, translate: 0 },
            });
            annuli.push(Annulus {
                minus: b,
                plus: a,
                label: AnnulusLabel { base: i, negated: true, translate: 0 },
            });
        }
        AnnulusSystem::new(self.leaves.len(), annuli)
    }

    /// Vertices of the subtree spanned by the given points.
    pub fn span(&self, points: &[usize]) -> Vec<bool> {
        let n = self.adj.len();
        let mut inside = alloc::vec![false; n];
        let Some(&first) = points.first() else {
            return inside;
        };
        let root = self.leaves[first];
        let mut parent = alloc::vec![usize::MAX; n];
        let mut order = alloc::vec![root];
        parent[root] = root;
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            i += 1;
            for &v in &self.adj[u] {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    order.push(v);
                }
            }
        }
        inside[root] = true;
        for &p in points {
            let mut x = self.leaves[p];
            while !inside[x] {
                inside[x] = true;
                x = parent[x];
            }
        }
        inside
    }

    /// Edge distance between the subtrees spanned by `k` and `l`.
    pub fn subtree_distance(&self, k: &[usize], l: &[usize]) -> usize {
        let a = self.span(k);
        let b = self.span(l);
        if a.iter().zip(&b).any(|(x, y)| *x && *y) {
            return 0;
        }
        // multi-source BFS from the first span
        let mut dist = alloc::vec![usize::MAX; self.adj.len()];
        let mut q = VecDeque::new();
        for (v, _) in a.iter().enumerate().filter(|(_, x)| **x) {
            dist[v] = 0;
            q.push_back(v);
        }
        while let Some(u) = q.pop_front() {
            if b[u] {
                return dist[u];
            }
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
            }
        }
        unreachable!("trees are connected")
    }

    /// The median vertex of three points.
    pub fn center(&self, x: usize, y: usize, z: usize) -> usize {
        let dx = self.distances_from(self.leaves[x]);
        let dy = self.distances_from(self.leaves[y]);
        let dz = self.distances_from(self.leaves[z]);
        (0..self.adj.len())
            .min_by_key(|&v| dx[v] + dy[v] + dz[v])
            .expect("nonempty tree")
    }
}
