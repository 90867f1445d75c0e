//! Scans of the chain-counted crossratio over finite subsets of the sample.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::system::Crossratio;

/// `k`-subsets of `points`: all of them when there are at most `budget`,
/// otherwise `budget` distinct ones drawn with a seeded generator. The flag
/// tells which.
pub fn subsets(points: &[usize], k: usize, budget: usize, seed: u64) -> (Vec<Vec<usize>>, bool) {
    let n = points.len();
    if n < k {
        return (Vec::new(), true);
    }
    if binomial(n, k) <= budget as u128 {
        let mut out = Vec::new();
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.iter().map(|&i| points[i]).collect());
            let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
                break;
            };
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
        return (out, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::with_capacity(budget);
    while out.len() < budget {
        let mut s: Vec<usize> = Vec::with_capacity(k);
        while s.len() < k {
            let i = rng.random_range(0..n);
            if !s.contains(&i) {
                s.push(i);
            }
        }
        s.sort_unstable();
        if seen.insert(s.clone()) {
            out.push(s.iter().map(|&i| points[i]).collect());
        }
    }
    (out, false)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        r = r * (n as u128 - i) / (i + 1);
    }
    r
}

/// The three pair-pair crossratios of a quadruple, in the order
/// `(xy|zw), (xz|yw), (xw|yz)`.
pub fn partitions(cr: &mut Crossratio, q: &[usize]) -> [u32; 3] {
    let [x, y, z, w] = [q[0], q[1], q[2], q[3]];
    [cr.pairs(x, y, z, w), cr.pairs(x, z, y, w), cr.pairs(x, w, y, z)]
}

fn middle(v: [u32; 3]) -> u32 {
    let mut s = v;
    s.sort_unstable();
    s[1]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomScan {
    pub points: usize,
    pub quadruples: usize,
    pub exhaustive: bool,
    /// Largest crossratio seen between disjoint pairs.
    pub a1_max: u32,
    pub a1_witness: Option<[usize; 4]>,
    /// Smallest `k` with `min((xz|yw), (xw|yz)) <= k` for every labeling.
    pub a2_k: u32,
    pub a2_witness: Option<[usize; 4]>,
    /// Quadruples on which `k = 0` fails.
    pub a2_failures_at_zero: usize,
}

pub fn axiom_scan(cr: &mut Crossratio, points: &[usize], budget: usize, seed: u64) -> AxiomScan {
    let (quads, exhaustive) = subsets(points, 4, budget, seed);
    let mut scan = AxiomScan {
        points: points.len(),
        quadruples: quads.len(),
        exhaustive,
        a1_max: 0,
        a1_witness: None,
        a2_k: 0,
        a2_witness: None,
        a2_failures_at_zero: 0,
    };
    for q in &quads {
        let v = partitions(cr, q);
        let arr = [q[0], q[1], q[2], q[3]];
        let top = *v.iter().max().expect("three values");
        if top > scan.a1_max || scan.a1_witness.is_none() {
            scan.a1_max = scan.a1_max.max(top);
            scan.a1_witness = Some(arr);
        }
        let mid = middle(v);
        if mid > 0 {
            scan.a2_failures_at_zero += 1;
        }
        if mid > scan.a2_k {
            scan.a2_k = mid;
            scan.a2_witness = Some(arr);
        }
    }
    scan
}

/// Crossratio values among five points, indexed by point positions.
struct Five {
    table: [[u32; 25]; 25],
}

impl Five {
    fn new(cr: &mut Crossratio, p: &[usize]) -> Self {
        let mut table = [[0u32; 25]; 25];
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    for d in 0..5 {
                        let distinct = a != b && c != d && a != c && a != d && b != c && b != d;
                        if distinct && a < b && c < d && a < c {
                            let v = cr.pairs(p[a], p[b], p[c], p[d]);
                            for (i, j) in [(a, b), (b, a)] {
                                for (k, l) in [(c, d), (d, c)] {
                                    table[i * 5 + j][k * 5 + l] = v;
                                    table[k * 5 + l][i * 5 + j] = v;
                                }
                            }
                        }
                    }
                }
            }
        }
        Five { table }
    }

    fn get(&self, x: usize, y: usize, z: usize, w: usize) -> u32 {
        self.table[x * 5 + y][z * 5 + w]
    }

    /// Least `k` for which some labeling satisfies the three (C2) relations.
    fn c2(&self) -> u32 {
        let mut best = u32::MAX;
        for perm in permutations5() {
            let [x, y, z, w, u] = perm;
            let d1 = self.get(x, y, z, u).abs_diff(self.get(x, y, w, u));
            let d2 = self.get(x, u, z, w).abs_diff(self.get(y, u, z, w));
            let d3 = self.get(x, y, z, w).abs_diff(self.get(x, y, z, u) + self.get(x, u, z, w));
            best = best.min(d1.max(d2).max(d3));
            if best == 0 {
                break;
            }
        }
        best
    }
}

fn permutations5() -> impl Iterator<Item = [usize; 5]> {
    (0..5usize.pow(5)).filter_map(|mut c| {
        let mut p = [0usize; 5];
        for slot in p.iter_mut() {
            *slot = c % 5;
            c /= 5;
        }
        let mut seen = [false; 5];
        for &v in &p {
            if seen[v] {
                return None;
            }
            seen[v] = true;
        }
        Some(p)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossratioAxioms {
    pub four_sets: usize,
    pub five_sets: usize,
    pub exhaustive: bool,
    pub c1_k: u32,
    pub c2_k: u32,
    /// Path property spot checks at the passing `k`: attempted and realized.
    pub path_checks: usize,
    pub path_realized: usize,
}

impl CrossratioAxioms {
    /// Least `k` passing both (C1) and (C2) on the scanned subsets.
    pub fn k(&self) -> u32 {
        self.c1_k.max(self.c2_k)
    }
}

/// `(ab:cd)` at tolerance `k`.
fn separates(cr: &mut Crossratio, a: usize, b: usize, c: usize, d: usize, k: u32) -> bool {
    cr.pairs(a, c, b, d) <= k && cr.pairs(a, d, b, c) <= k
}

/// `(xy:u:zw)` at tolerance `k`.
fn between(cr: &mut Crossratio, [x, y, z, w]: [usize; 4], u: usize, k: u32) -> bool {
    separates(cr, x, y, z, w, k)
        && separates(cr, y, u, z, w, k)
        && separates(cr, x, u, z, w, k)
        && separates(cr, x, y, u, w, k)
        && separates(cr, x, y, u, z, k)
}

pub fn crossratio_axioms(
    cr: &mut Crossratio,
    points: &[usize],
    budget4: usize,
    budget5: usize,
    path_budget: usize,
    seed: u64,
) -> CrossratioAxioms {
    let (quads, ex4) = subsets(points, 4, budget4, seed);
    let (fives, ex5) = subsets(points, 5, budget5, seed ^ 0x5eed);
    let mut c1_k = 0;
    for q in &quads {
        c1_k = c1_k.max(middle(partitions(cr, q)));
    }
    let mut c2_k = 0;
    for f in &fives {
        c2_k = c2_k.max(Five::new(cr, f).c2());
    }
    let k = c1_k.max(c2_k);
    let mut path_checks = 0;
    let mut path_realized = 0;
    'outer: for q in &quads {
        // label so that (xy|zw) is the large partition
        let v = partitions(cr, q);
        let lab = match (0..3).max_by_key(|&i| (v[i], core::cmp::Reverse(i))).unwrap_or(0) {
            0 => [q[0], q[1], q[2], q[3]],
            1 => [q[0], q[2], q[1], q[3]],
            _ => [q[0], q[3], q[1], q[2]],
        };
        let n = *v.iter().max().unwrap_or(&0);
        for p in 1..n {
            if path_checks >= path_budget {
                break 'outer;
            }
            path_checks += 1;
            let [x, y, z, _] = lab;
            let found = points.iter().any(|&u| {
                !lab.contains(&u)
                    && cr.pairs(x, y, z, u).abs_diff(p) <= k
                    && between(cr, lab, u, k)
            });
            path_realized += usize::from(found);
        }
    }
    CrossratioAxioms {
        four_sets: quads.len(),
        five_sets: fives.len(),
        exhaustive: ex4 && ex5,
        c1_k,
        c2_k,
        path_checks,
        path_realized,
    }
}

/// `ρ(A, B)`: the largest of the nine pair-vs-pair crossratios.
pub fn rho(cr: &mut Crossratio, a: [usize; 3], b: [usize; 3]) -> u32 {
    let pa = [(a[0], a[1]), (a[0], a[2]), (a[1], a[2])];
    let pb = [(b[0], b[1]), (b[0], b[2]), (b[1], b[2])];
    let mut best = 0;
    for &(x, y) in &pa {
        for &(z, w) in &pb {
            best = best.max(cr.pairs(x, y, z, w));
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityReport {
    pub checked: usize,
    pub violations: usize,
    /// Largest amount by which the left side exceeded the right.
    pub worst_excess: u32,
}

/// `(A|B) <= (A|x) + (x|B) + 1` over pairs of disjoint pairs and points.
pub fn triangle_check(cr: &mut Crossratio, points: &[usize], budget: usize, seed: u64) -> InequalityReport {
    let (fives, _) = subsets(points, 5, budget, seed);
    let mut rep = InequalityReport { checked: 0, violations: 0, worst_excess: 0 };
    for f in &fives {
        // every split of five points into pair, pair, point
        for xi in 0..5 {
            let rest: Vec<usize> = (0..5).filter(|&i| i != xi).map(|i| f[i]).collect();
            let x = f[xi];
            for (a, b) in [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))] {
                let ka = [rest[a.0], rest[a.1]];
                let kb = [rest[b.0], rest[b.1]];
                let lhs = cr.value(&ka, &kb);
                let rhs = cr.value(&ka, &[x]) + cr.value(&[x], &kb) + 1;
                rep.checked += 1;
                if lhs > rhs {
                    rep.violations += 1;
                    rep.worst_excess = rep.worst_excess.max(lhs - rhs);
                }
            }
        }
    }
    rep
}
