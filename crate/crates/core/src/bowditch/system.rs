//! Annulus systems on a finite sample and chain-counted crossratios.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Where an annulus instance comes from: base annulus, sign, and the index
/// of the translating group element (0 when there is none).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnnulusLabel {
    pub base: usize,
    pub negated: bool,
    pub translate: usize,
}

/// Sides of an annulus restricted to the sample, as interiors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annulus {
    pub minus: BitSet,
    pub plus: BitSet,
    pub label: AnnulusLabel,
}

/// Deduplicated annulus instances with the strict relation
/// `A < B ⟺ int A^+ ∪ int B^- = M` evaluated over the sample.
#[derive(Clone, Debug)]
pub struct AnnulusSystem {
    sample_size: usize,
    annuli: Vec<Annulus>,
    negation: Vec<usize>,
    /// `preds[a]` lists every `b` with `b < a`.
    preds: Vec<Vec<u32>>,
    /// A topological order of the relation.
    order: Vec<u32>,
    duplicates: usize,
    covering: usize,
}

pub const CYCLE_MESSAGE: &str = "degenerate annulus system: shrink ε or raise margin";

impl AnnulusSystem {
    pub fn new(sample_size: usize, candidates: Vec<Annulus>) -> Result<Self> {
        let mut annuli: Vec<Annulus> = Vec::new();
        let mut index: BTreeMap<(BitSet, BitSet), usize> = BTreeMap::new();
        let mut duplicates = 0;
        let mut covering = 0;
        for a in candidates {
            if a.minus.len() != sample_size || a.plus.len() != sample_size {
                return Err(Error::input("annulus sides must be sets over the sample"));
            }
            if a.minus.intersects(&a.plus) {
                return Err(Error::degenerate(alloc::format!(
                    "annulus {:?} has overlapping sides on the sample",
                    a.label
                )));
            }
            if a.minus.count() == sample_size || a.plus.count() == sample_size {
                // not an annulus on this sample; its negative goes too
                covering += 1;
                continue;
            }
            let key = (a.minus.clone(), a.plus.clone());
            if index.contains_key(&key) {
                duplicates += 1;
                continue;
            }
            index.insert(key, annuli.len());
            annuli.push(a);
        }
        let negation = annuli
            .iter()
            .map(|a| {
                index.get(&(a.plus.clone(), a.minus.clone())).copied().ok_or_else(|| {
                    Error::input(alloc::format!("annulus {:?} has no negative in the system", a.label))
                })
            })
            .collect::<Result<Vec<usize>>>()?;
        let m = annuli.len();
        let mut preds: Vec<Vec<u32>> = alloc::vec![Vec::new(); m];
        for (a, pa) in preds.iter_mut().enumerate() {
            for b in 0..m {
                if a != b && annuli[b].plus.union_is_full(&annuli[a].minus) {
                    pa.push(b as u32);
                }
            }
        }
        let order = topological_order(&preds).ok_or_else(|| Error::degenerate(CYCLE_MESSAGE))?;
        Ok(AnnulusSystem { sample_size, annuli, negation, preds, order, duplicates, covering })
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    pub fn len(&self) -> usize {
        self.annuli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annuli.is_empty()
    }

    pub fn annuli(&self) -> &[Annulus] {
        &self.annuli
    }

    /// Index of `−A`.
    pub fn negation(&self, a: usize) -> usize {
        self.negation[a]
    }

    /// Candidates dropped as duplicates of an earlier signature.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    /// Candidates dropped because one side covered the whole sample.
    pub fn covering(&self) -> usize {
        self.covering
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.preds[b].contains(&(a as u32))
    }

    pub fn relation_size(&self) -> usize {
        self.preds.iter().map(|p| p.len()).sum()
    }

    /// Membership profile of a sample point.
    pub fn sample_profile(&self, p: usize) -> Profile {
        let m = self.annuli.len();
        let mut minus = BitSet::new(m);
        let mut plus = BitSet::new(m);
        for (i, a) in self.annuli.iter().enumerate() {
            if a.minus.contains(p) {
                minus.insert(i);
            }
            if a.plus.contains(p) {
                plus.insert(i);
            }
        }
        Profile { minus, plus }
    }

    /// Longest chains `A_1 < ... < A_j = A` with `A_1` in `sources`.
    pub fn chain_lengths(&self, sources: &BitSet) -> Vec<u16> {
        let mut best = alloc::vec![0u16; self.annuli.len()];
        for &a in &self.order {
            let a = a as usize;
            let mut v = u16::from(sources.contains(a));
            for &b in &self.preds[a] {
                let bb = best[b as usize];
                if bb > 0 && bb + 1 > v {
                    v = bb + 1;
                }
            }
            best[a] = v;
        }
        best
    }
}

fn topological_order(preds: &[Vec<u32>]) -> Option<Vec<u32>> {
    let m = preds.len();
    let mut succs: Vec<Vec<u32>> = alloc::vec![Vec::new(); m];
    let mut indeg = alloc::vec![0usize; m];
    for (a, p) in preds.iter().enumerate() {
        indeg[a] = p.len();
        for &b in p {
            succs[b as usize].push(a as u32);
        }
    }
    let mut stack: Vec<u32> = (0..m as u32).rev().filter(|&a| indeg[a as usize] == 0).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(a) = stack.pop() {
        order.push(a);
        for &s in &succs[a as usize] {
            indeg[s as usize] -= 1;
            if indeg[s as usize] == 0 {
                stack.push(s);
            }
        }
    }
    (order.len() == m).then_some(order)
}

/// Which annulus interiors contain a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub minus: BitSet,
    pub plus: BitSet,
}

/// Crossratios `(K|L)` over an annulus system, for sample points and for
/// points added later by their membership profiles.
#[derive(Clone, Debug)]
pub struct Crossratio {
    system: AnnulusSystem,
    profiles: Vec<Profile>,
    memo: BTreeMap<Vec<u32>, Vec<u16>>,
    pair_memo: BTreeMap<(u32, u32), Vec<u16>>,
}

impl Crossratio {
    pub fn new(system: AnnulusSystem) -> Self {
        let profiles = (0..system.sample_size()).map(|p| system.sample_profile(p)).collect();
        Crossratio { system, profiles, memo: BTreeMap::new(), pair_memo: BTreeMap::new() }
    }

    pub fn system(&self) -> &AnnulusSystem {
        &self.system
    }

    pub fn num_points(&self) -> usize {
        self.profiles.len()
    }

    pub fn profile(&self, p: usize) -> &Profile {
        &self.profiles[p]
    }

    /// Registers an off-sample point; returns its id.
    pub fn add_point(&mut self, profile: Profile) -> Result<usize> {
        if profile.minus.len() != self.system.len() || profile.plus.len() != self.system.len() {
            return Err(Error::input("profile size does not match the annulus system"));
        }
        self.profiles.push(profile);
        Ok(self.profiles.len() - 1)
    }

    /// `{A : K ⊂ int A^-}`.
    pub fn sources(&self, k: &[usize]) -> BitSet {
        let mut s = BitSet::full(self.system.len());
        for &p in k {
            s = s.and(&self.profiles[p].minus);
        }
        s
    }

    /// `{A : L ⊂ int A^+}`.
    pub fn sinks(&self, l: &[usize]) -> BitSet {
        let mut s = BitSet::full(self.system.len());
        for &p in l {
            s = s.and(&self.profiles[p].plus);
        }
        s
    }

    /// `(K|L)` counted from `K` to `L` without using the symmetry.
    pub fn directed(&mut self, k: &[usize], l: &[usize]) -> u32 {
        if k.is_empty() || l.is_empty() || k.iter().any(|p| l.contains(p)) {
            return 0;
        }
        let mut key: Vec<u32> = k.iter().map(|&p| p as u32).collect();
        key.sort_unstable();
        key.dedup();
        if !self.memo.contains_key(&key) {
            let sources = self.sources(k);
            let best = self.system.chain_lengths(&sources);
            self.memo.insert(key.clone(), best);
        }
        let best = &self.memo[&key];
        let sinks = self.sinks(l);
        sinks.iter().map(|a| best[a] as u32).max().unwrap_or(0)
    }

    /// `(K|L)`, evaluated from the lexicographically smaller side so that
    /// the table is exactly symmetric.
    pub fn value(&mut self, k: &[usize], l: &[usize]) -> u32 {
        let mut ks: Vec<usize> = k.to_vec();
        let mut ls: Vec<usize> = l.to_vec();
        ks.sort_unstable();
        ls.sort_unstable();
        if ks <= ls {
            self.directed(&ks, &ls)
        } else {
            self.directed(&ls, &ks)
        }
    }

    /// `(xy|zw)`.
    pub fn pairs(&mut self, x: usize, y: usize, z: usize, w: usize) -> u32 {
        if x == y || z == w {
            return self.value(&[x, y], &[z, w]);
        }
        let k = (x.min(y), x.max(y));
        let l = (z.min(w), z.max(w));
        let (k, l) = if k <= l { (k, l) } else { (l, k) };
        if k.0 == l.0 || k.0 == l.1 || k.1 == l.0 || k.1 == l.1 {
            return 0;
        }
        let key = (k.0 as u32, k.1 as u32);
        if !self.pair_memo.contains_key(&key) {
            let sources = self.profiles[k.0].minus.and(&self.profiles[k.1].minus);
            let best = self.system.chain_lengths(&sources);
            self.pair_memo.insert(key, best);
        }
        let best = &self.pair_memo[&key];
        let (pa, pb) = (self.profiles[l.0].plus.words(), self.profiles[l.1].plus.words());
        let mut top = 0u16;
        for (i, (a, b)) in pa.iter().zip(pb).enumerate() {
            let mut bits = a & b;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                top = top.max(best[i * 64 + j]);
            }
        }
        u32::from(top)
    }

    pub fn memo_size(&self) -> usize {
        self.memo.len() + self.pair_memo.len()
    }
}

#[cfg(test)]
pub(crate) fn topological_order_for_tests(preds: &[Vec<u32>]) -> Option<Vec<u32>> {
    topological_order(preds)
}
