//! The triple quasi-metric, the graphs `G_r(Q)` and four-point δ.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::axioms::{rho, subsets, InequalityReport};
use super::system::Crossratio;
use crate::error::{Error, Result};

/// `ρ` on a list of triples, stored as a dense symmetric table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoTable {
    triples: Vec<[usize; 3]>,
    values: Vec<u32>,
}

impl RhoTable {
    pub fn new(cr: &mut Crossratio, triples: Vec<[usize; 3]>) -> Result<Self> {
        for t in &triples {
            if t[0] == t[1] || t[0] == t[2] || t[1] == t[2] {
                return Err(Error::input(alloc::format!("triple {t:?} repeats a point")));
            }
        }
        let n = triples.len();
        let mut values = alloc::vec![0u32; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rho(cr, triples[i], triples[j]);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Ok(RhoTable { triples, values })
    }

    /// Rebuilds a table from stored entries.
    pub fn from_values(triples: Vec<[usize; 3]>, values: Vec<u32>) -> Result<Self> {
        let n = triples.len();
        if values.len() != n * n {
            return Err(Error::input("rho table has the wrong size"));
        }
        Ok(RhoTable { triples, values })
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.values[i * self.triples.len() + j]
    }

    pub fn max(&self) -> u32 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    /// `ρ(A,C) <= ρ(A,B) + ρ(B,C) + k` over sampled triples of vertices.
    pub fn quasi_metric_check(&self, k: u32, budget: usize, seed: u64) -> InequalityReport {
        let ids: Vec<usize> = (0..self.len()).collect();
        let (sets, _) = subsets(&ids, 3, budget, seed);
        let mut rep = InequalityReport { checked: 0, violations: 0, worst_excess: 0 };
        for s in &sets {
            for (a, b, c) in [(s[0], s[1], s[2]), (s[1], s[0], s[2]), (s[0], s[2], s[1])] {
                let lhs = self.get(a, c);
                let rhs = self.get(a, b) + self.get(b, c) + k;
                rep.checked += 1;
                if lhs > rhs {
                    rep.violations += 1;
                    rep.worst_excess = rep.worst_excess.max(lhs - rhs);
                }
            }
        }
        rep
    }

    /// Least `r` for which `G_r` is connected (bottleneck spanning tree).
    pub fn connectivity_threshold(&self) -> u32 {
        let n = self.len();
        let mut edges: Vec<(u32, usize, usize)> = Vec::with_capacity(n * n / 2);
        for i in 0..n {
            for j in i + 1..n {
                edges.push((self.get(i, j), i, j));
            }
        }
        edges.sort_unstable();
        let mut uf = UnionFind::new(n);
        let mut parts = n;
        for (w, i, j) in edges {
            if parts <= 1 {
                break;
            }
            if uf.union(i, j) {
                parts -= 1;
                if parts == 1 {
                    return w;
                }
            }
        }
        0
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// `G_r(Q)`: triples joined when `ρ <= r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BowditchGraph {
    r: u32,
    adj: Vec<Vec<usize>>,
}

pub fn build_graph(table: &RhoTable, r: u32) -> BowditchGraph {
    let n = table.len();
    let adj = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && table.get(i, j) <= r).collect())
        .collect();
    BowditchGraph { r, adj }
}

impl BowditchGraph {
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, a)| a.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// BFS distances; `u32::MAX` marks unreachable vertices.
    pub fn distances_from(&self, s: usize) -> Vec<u32> {
        let mut dist = alloc::vec![u32::MAX; self.adj.len()];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
            }
        }
        dist
    }

    /// Connected components as a vertex labeling and a count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.adj.len();
        let mut comp = alloc::vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            let mut stack = alloc::vec![s];
            while let Some(u) = stack.pop() {
                for &v in &self.adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// All-pairs distances; fails on a disconnected graph.
    pub fn all_distances(&self) -> Result<Vec<Vec<u32>>> {
        let (_, count) = self.components();
        if count > 1 {
            return Err(Error::degenerate(alloc::format!(
                "graph at r = {} has {count} components",
                self.r
            )));
        }
        Ok((0..self.adj.len()).map(|s| self.distances_from(s)).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaEstimate {
    /// Largest four-point defect, half the gap between the two largest sums.
    pub delta: f64,
    pub quadruples: usize,
    pub exhaustive: bool,
    pub diameter: u32,
}

pub fn estimate_delta(g: &BowditchGraph, budget: usize, seed: u64) -> Result<DeltaEstimate> {
    let d = g.all_distances()?;
    let ids: Vec<usize> = (0..g.num_vertices()).collect();
    let (quads, exhaustive) = subsets(&ids, 4, budget, seed);
    let mut worst: u32 = 0;
    for q in &quads {
        let [x, y, z, w] = [q[0], q[1], q[2], q[3]];
        let mut s = [d[x][y] + d[z][w], d[x][z] + d[y][w], d[x][w] + d[y][z]];
        s.sort_unstable();
        worst = worst.max(s[2] - s[1]);
    }
    let diameter = d.iter().flat_map(|r| r.iter().copied()).max().unwrap_or(0);
    Ok(DeltaEstimate { delta: f64::from(worst) / 2.0, quadruples: quads.len(), exhaustive, diameter })
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let rx = ranks(x);
    let ry = ranks(y);
    let n = rx.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / libm::sqrt(sxx * syy)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = alloc::vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

/// Spearman correlation between graph distance and `ρ` over all pairs.
pub fn distance_correlation(g: &BowditchGraph, table: &RhoTable) -> Result<f64> {
    let d = g.all_distances()?;
    let n = table.len();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, row) in d.iter().enumerate() {
        for (j, &dij) in row.iter().enumerate().take(n).skip(i + 1) {
            xs.push(f64::from(dij));
            ys.push(f64::from(table.get(i, j)));
        }
    }
    Ok(spearman(&xs, &ys))
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
