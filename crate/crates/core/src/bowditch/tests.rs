use alloc::vec::Vec;

use proptest::prelude::*;

use super::system::topological_order_for_tests;
use super::*;
use crate::bitset::BitSet;

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            v.push((a, b));
        }
    }
    v
}

fn all_triples(n: usize) -> Vec<[usize; 3]> {
    let mut v = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                v.push([a, b, c]);
            }
        }
    }
    v
}

fn model(t: &TreeModel) -> Crossratio {
    Crossratio::new(t.system().unwrap())
}

/// Every pair-pair crossratio against the Steiner-subtree distance.
fn check_against_oracle(t: &TreeModel) -> usize {
    let mut cr = model(t);
    let pairs = all_pairs(t.num_points());
    let mut checked = 0;
    for &(x, y) in &pairs {
        for &(z, w) in &pairs {
            let oracle = t.subtree_distance(&[x, y], &[z, w]) as u32;
            assert_eq!(cr.pairs(x, y, z, w), oracle, "({x}{y}|{z}{w})");
            assert_eq!(cr.directed(&[x, y], &[z, w]), cr.directed(&[z, w], &[x, y]));
            checked += 1;
        }
    }
    checked
}

#[test]
fn star_crossratios_vanish() {
    for k in 3..6 {
        let t = TreeModel::star(k).unwrap();
        let mut cr = model(&t);
        for &(x, y) in &all_pairs(k) {
            for &(z, w) in &all_pairs(k) {
                assert_eq!(cr.pairs(x, y, z, w), 0);
            }
        }
    }
}

#[test]
fn caterpillars_match_oracle() {
    for n in 3..=8 {
        let t = TreeModel::caterpillar(n).unwrap();
        assert_eq!(t.num_points(), n);
        assert!(check_against_oracle(&t) > 0);
    }
}

#[test]
fn path_with_hung_leaves() {
    // spine a-b-c-d-e, two leaves at each end, one at each interior vertex
    let t = TreeModel::caterpillar(7).unwrap();
    let mut cr = model(&t);
    let leaves = t.leaves();
    let spine_end = |v: usize| t.edges().iter().any(|&(u, w)| (u == 0 && w == v) || (w == 0 && u == v));
    let left: Vec<usize> = (0..7).filter(|&i| spine_end(leaves[i])).collect();
    let right: Vec<usize> = (0..7)
        .filter(|&i| t.edges().iter().any(|&(u, w)| u == 4 && w == leaves[i]))
        .collect();
    assert_eq!((left.len(), right.len()), (2, 2));
    // four spine edges between the end cherries
    assert_eq!(cr.pairs(left[0], left[1], right[0], right[1]), 4);
    assert_eq!(t.subtree_distance(&left, &right), 4);
}

#[test]
fn degree_two_and_bad_trees_rejected() {
    assert!(TreeModel::new(3, &[(0, 1), (1, 2)]).unwrap_err().is_input());
    assert!(TreeModel::new(4, &[(0, 1), (0, 2)]).is_err());
    assert!(TreeModel::new(4, &[(0, 1), (1, 2), (2, 0)]).is_err());
    assert!(TreeModel::caterpillar(2).is_err());
}

#[test]
fn tree_axioms_hold_exactly() {
    for n in 4..=8 {
        let t = TreeModel::caterpillar(n).unwrap();
        let mut cr = model(&t);
        let pts: Vec<usize> = (0..n).collect();
        let scan = axiom_scan(&mut cr, &pts, 1 << 20, 1);
        assert!(scan.exhaustive);
        assert_eq!(scan.a2_k, 0);
        let ax = crossratio_axioms(&mut cr, &pts, 1 << 20, 1 << 20, 1 << 20, 1);
        assert!(ax.exhaustive);
        assert_eq!(ax.k(), 0);
        assert_eq!(ax.path_realized, ax.path_checks);
        let tri = triangle_check(&mut cr, &pts, 1 << 20, 1);
        assert_eq!(tri.violations, 0);
        assert!(tri.checked > 0 || n < 5);
    }
}

#[test]
fn rho_is_tripod_center_distance() {
    let t = TreeModel::caterpillar(7).unwrap();
    let mut cr = model(&t);
    let triples = all_triples(7);
    let table = RhoTable::new(&mut cr, triples.clone()).unwrap();
    for (i, a) in triples.iter().enumerate() {
        let ca = t.center(a[0], a[1], a[2]);
        let da = t.distances_from(ca);
        for (j, b) in triples.iter().enumerate() {
            let cb = t.center(b[0], b[1], b[2]);
            assert_eq!(table.get(i, j) as usize, da[cb]);
        }
        assert_eq!(table.get(i, i), 0);
    }
    assert_eq!(table.quasi_metric_check(0, 1 << 24, 1).violations, 0);
}

#[test]
fn zero_graph_groups_by_center() {
    let t = TreeModel::caterpillar(8).unwrap();
    let mut cr = model(&t);
    let triples = all_triples(8);
    let table = RhoTable::new(&mut cr, triples.clone()).unwrap();
    let g = build_graph(&table, 0);
    let (comp, count) = g.components();
    let centers: Vec<usize> = triples.iter().map(|a| t.center(a[0], a[1], a[2])).collect();
    for i in 0..triples.len() {
        for j in 0..triples.len() {
            assert_eq!(comp[i] == comp[j], centers[i] == centers[j]);
        }
    }
    let mut distinct = centers.clone();
    distinct.sort_unstable();
    distinct.dedup();
    assert_eq!(count, distinct.len());
}

#[test]
fn tree_complex_is_thin() {
    for n in 5..=8 {
        let t = TreeModel::caterpillar(n).unwrap();
        let mut cr = model(&t);
        let table = RhoTable::new(&mut cr, all_triples(n)).unwrap();
        let r = table.connectivity_threshold();
        assert!(!build_graph(&table, r.saturating_sub(1)).is_connected() || r == 0);
        let g = build_graph(&table, r + 1);
        assert!(g.is_connected());
        let d = estimate_delta(&g, 1 << 22, 1).unwrap();
        assert!(d.exhaustive);
        assert!(d.delta <= 1.0, "delta {}", d.delta);
    }
}

#[test]
fn complete_graph_and_monotone_edges() {
    let t = TreeModel::caterpillar(6).unwrap();
    let mut cr = model(&t);
    let table = RhoTable::new(&mut cr, all_triples(6)).unwrap();
    let full = build_graph(&table, table.max());
    let n = table.len();
    assert_eq!(full.num_edges(), n * (n - 1) / 2);
    assert!(estimate_delta(&full, 1 << 22, 1).unwrap().delta <= 1.0);
    for r in 0..table.max() {
        let a = build_graph(&table, r);
        let b = build_graph(&table, r + 1);
        assert!(a.edges().all(|(u, v)| b.has_edge(u, v)));
    }
}

#[test]
fn disconnected_delta_names_components() {
    let t = TreeModel::caterpillar(6).unwrap();
    let mut cr = model(&t);
    let table = RhoTable::new(&mut cr, all_triples(6)).unwrap();
    let err = estimate_delta(&build_graph(&table, 0), 100, 1).unwrap_err();
    assert!(alloc::format!("{err}").contains("components"));
}

/// Points `0..n` on a line; `A_s` has minus side `t < s` and plus side
/// `t > s`, so `A_s < A_t` exactly when `s < t`.
fn line_system(n: usize) -> AnnulusSystem {
    let mut annuli = Vec::new();
    for s in 1..n - 1 {
        let mut minus = BitSet::new(n);
        let mut plus = BitSet::new(n);
        for t in 0..n {
            if t < s {
                minus.insert(t);
            }
            if t > s {
                plus.insert(t);
            }
        }
        annuli.push(Annulus {
            minus: minus.clone(),
            plus: plus.clone(),
            label: AnnulusLabel { base: s, negated: false, translate: 0 },
        });
        annuli.push(Annulus {
            minus: plus,
            plus: minus,
            label: AnnulusLabel { base: s, negated: true, translate: 0 },
        });
    }
    AnnulusSystem::new(n, annuli).unwrap()
}

#[test]
fn nested_neighborhoods_on_a_line() {
    let n = 12;
    let sys = line_system(n);
    let idx =
        |s: usize, neg: bool| sys.annuli().iter().position(|a| a.label.base == s && a.label.negated == neg).unwrap();
    for s in 1..n - 1 {
        for t in 1..n - 1 {
            // the gap of each annulus is the single point s
            assert_eq!(sys.less(idx(s, false), idx(t, false)), s < t);
        }
        assert!(!sys.less(idx(s, false), idx(s, true)));
        assert_eq!(sys.negation(idx(s, false)), idx(s, true));
    }
    let mut cr = Crossratio::new(sys);
    for a in 0..n {
        for b in a + 1..n {
            // annuli strictly between points a and b
            assert_eq!(cr.value(&[a], &[b]) as usize, b - a - 1);
        }
    }
    assert_eq!(cr.pairs(0, 1, n - 2, n - 1) as usize, n - 4);
}

#[test]
fn shared_points_give_zero() {
    let mut cr = Crossratio::new(line_system(10));
    assert_eq!(cr.pairs(0, 5, 5, 9), 0);
    assert_eq!(cr.value(&[0, 1, 2], &[2, 9]), 0);
    assert_eq!(rho(&mut cr, [0, 1, 9], [0, 1, 8]), 0);
    assert_eq!(rho(&mut cr, [0, 1, 9], [0, 1, 9]), 0);
}

#[test]
fn system_rejects_bad_annuli() {
    let mut a = BitSet::new(3);
    a.insert(0);
    let mut b = BitSet::new(3);
    b.insert(0);
    b.insert(1);
    let mk = |minus: &BitSet, plus: &BitSet| Annulus {
        minus: minus.clone(),
        plus: plus.clone(),
        label: AnnulusLabel { base: 0, negated: false, translate: 0 },
    };
    // overlapping sides
    assert!(matches!(AnnulusSystem::new(3, alloc::vec![mk(&a, &b), mk(&b, &a)]), Err(crate::Error::Degenerate(_))));
    // no negative
    let mut c = BitSet::new(3);
    c.insert(2);
    assert!(AnnulusSystem::new(3, alloc::vec![mk(&a, &c)]).unwrap_err().is_input());
    // duplicates collapse
    let sys = AnnulusSystem::new(3, alloc::vec![mk(&a, &c), mk(&a, &c), mk(&c, &a)]).unwrap();
    assert_eq!((sys.len(), sys.duplicates()), (2, 1));
}

#[test]
fn cyclic_relation_is_reported() {
    let preds = alloc::vec![alloc::vec![2u32], alloc::vec![0], alloc::vec![1]];
    assert!(topological_order_for_tests(&preds).is_none());
    let acyclic = alloc::vec![alloc::vec![], alloc::vec![0u32], alloc::vec![0, 1]];
    assert_eq!(topological_order_for_tests(&acyclic), Some(alloc::vec![0, 1, 2]));
    assert!(CYCLE_MESSAGE.contains("shrink ε or raise margin"));
}

#[test]
fn off_sample_profiles() {
    let t = TreeModel::caterpillar(6).unwrap();
    let mut cr = model(&t);
    // a copy of point 0 behaves like point 0
    let p = cr.profile(0).clone();
    let id = cr.add_point(p).unwrap();
    for &(z, w) in &all_pairs(6) {
        if z != 0 && w != 0 {
            assert_eq!(cr.pairs(id, 1, z, w), cr.pairs(0, 1, z, w));
        }
    }
    assert!(cr.add_point(Profile { minus: BitSet::new(1), plus: BitSet::new(1) }).is_err());
}

#[test]
fn spearman_and_slope() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0];
    assert!((spearman(&x, &[2.0, 4.0, 6.0, 8.0, 10.0]) - 1.0).abs() < 1e-12);
    assert!((spearman(&x, &[5.0, 4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
    // ties get average ranks
    let s = spearman(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
    assert!((s - 0.866_025_403_784_438_6).abs() < 1e-12);
    assert!((slope(&x, &[3.0, 5.0, 7.0, 9.0, 11.0]) - 2.0).abs() < 1e-12);
    assert_eq!(slope(&[1.0], &[1.0]), 0.0);
}

#[test]
fn subsets_are_distinct_and_counted() {
    let pts: Vec<usize> = (0..10).collect();
    let (all, ex) = subsets(&pts, 4, 1000, 1);
    assert!(ex);
    assert_eq!(all.len() as u128, binomial(10, 4));
    let (some, ex) = subsets(&pts, 4, 50, 7);
    assert!(!ex);
    let mut s = some.clone();
    s.sort();
    s.dedup();
    assert_eq!(s.len(), 50);
    assert_eq!(subsets(&pts, 4, 50, 7).0, some);
}

/// Random trees without degree-2 vertices: grow from a star by hanging
/// leaves on internal vertices or splitting leaves into cherries.
fn random_tree(ops: &[(bool, usize)]) -> TreeModel {
    let mut edges: Vec<(usize, usize)> = (1..=3).map(|i| (0, i)).collect();
    let mut n = 4;
    for &(cherry, pick) in ops {
        let mut deg = alloc::vec![0usize; n];
        for &(u, v) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let (leaves, internal): (Vec<usize>, Vec<usize>) = (0..n).partition(|&v| deg[v] == 1);
        if cherry {
            let l = leaves[pick % leaves.len()];
            edges.push((l, n));
            edges.push((l, n + 1));
            n += 2;
        } else {
            let v = internal[pick % internal.len()];
            edges.push((v, n));
            n += 1;
        }
    }
    TreeModel::new(n, &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_trees_match_oracle(ops in proptest::collection::vec((any::<bool>(), 0usize..16), 0..5)) {
        let t = random_tree(&ops);
        prop_assume!(t.num_points() <= 9);
        check_against_oracle(&t);
        let mut cr = model(&t);
        let pts: Vec<usize> = (0..t.num_points()).collect();
        prop_assert_eq!(crossratio_axioms(&mut cr, &pts, 1 << 16, 1 << 16, 64, 1).k(), 0);
    }

    #[test]
    fn crossratio_symmetries(n in 6usize..9, q in proptest::collection::vec(0usize..8, 4)) {
        let t = TreeModel::caterpillar(n).unwrap();
        let mut cr = model(&t);
        let [x, y, z, w] = [q[0] % n, q[1] % n, q[2] % n, q[3] % n];
        let v = cr.pairs(x, y, z, w);
        prop_assert_eq!(v, cr.pairs(y, x, z, w));
        prop_assert_eq!(v, cr.pairs(z, w, x, y));
        prop_assert_eq!(v, cr.value(&[x, y], &[z, w]));
        if x == z || x == w || y == z || y == w {
            prop_assert_eq!(v, 0);
        }
    }
}

#[test]
fn triples_sharing_two_points_can_be_far() {
    let t = TreeModel::caterpillar(6).unwrap();
    let mut cr = model(&t);
    let leaves = t.leaves();
    let at = |s: usize| -> Vec<usize> {
        (0..6).filter(|&i| t.edges().iter().any(|&(u, v)| u == s && v == leaves[i])).collect()
    };
    let (l, r) = (at(0), at(3));
    let a = [l[0], r[0], l[1]];
    let b = [l[0], r[0], r[1]];
    let v = rho(&mut cr, a, b);
    assert_eq!(v, cr.pairs(l[0], l[1], r[0], r[1]));
    let ca = t.center(a[0], a[1], a[2]);
    let cb = t.center(b[0], b[1], b[2]);
    assert_eq!(v as usize, t.distances_from(ca)[cb]);
    assert_eq!(v, 3);
}
