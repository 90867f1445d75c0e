//! Subword-frequency approximants of currents.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::{MapPair, PairingEstimate, Sign, TreePoint};
use crate::aut::FreeGroupAut;
use crate::class::ConjClass;
use crate::error::{Error, Result};
use crate::train_track::TrainTrackMap;
use crate::word::{Letter, Word};

/// How an approximant was produced: `γ_k = [g(φ^k(base))]`, with
/// `growth^k` as the scaling sequence.
#[derive(Clone, Debug)]
pub struct CurrentRecipe {
    pub iterate: FreeGroupAut,
    pub growth: f64,
    pub base: ConjClass,
    pub k: usize,
    pub translate: FreeGroupAut,
}

impl CurrentRecipe {
    pub fn with_k(&self, k: usize) -> CurrentRecipe {
        CurrentRecipe { k, ..self.clone() }
    }

    /// The defining class `γ_k`.
    pub fn class(&self) -> ConjClass {
        let mut c = self.base.clone();
        for _ in 0..self.k {
            c = self.iterate.apply_class(&c);
        }
        self.translate.apply_class(&c)
    }

    pub fn scaling(&self) -> f64 {
        libm::pow(self.growth, self.k as f64)
    }
}

/// Frequencies of the oriented length-`L` cyclic subwords of `γ_k`.
#[derive(Clone, Debug)]
pub struct CurrentApprox {
    pub subpath_len: usize,
    pub freqs: BTreeMap<Word, f64>,
    pub class_len: usize,
    pub recipe: CurrentRecipe,
}

impl CurrentApprox {
    pub fn from_recipe(recipe: CurrentRecipe, subpath_len: usize) -> Result<Self> {
        if subpath_len == 0 {
            return Err(Error::input("subpath length must be positive"));
        }
        let gamma = recipe.class();
        if gamma.len() < subpath_len {
            return Err(Error::precondition(format!(
                "class of length {} is shorter than the subpath length {subpath_len}",
                gamma.len()
            )));
        }
        Ok(CurrentApprox {
            subpath_len,
            freqs: cyclic_frequencies(gamma.letters(), subpath_len),
            class_len: gamma.len(),
            recipe,
        })
    }

    pub fn freq(&self, w: &Word) -> f64 {
        self.freqs.get(w).copied().unwrap_or(0.0)
    }

    /// Sum over the last letter, giving length `L − 1` frequencies.
    pub fn marginal(&self) -> BTreeMap<Word, f64> {
        let mut out = BTreeMap::new();
        for (w, f) in &self.freqs {
            let l = w.letters();
            let key = Word::reduce(l[..l.len() - 1].iter().copied());
            *out.entry(key).or_insert(0.0) += f;
        }
        out
    }

    /// Sup-norm distance between frequency vectors of the same length.
    pub fn distance(&self, other: &CurrentApprox) -> f64 {
        let mut d = 0.0f64;
        for (w, f) in &self.freqs {
            d = d.max((f - other.freq(w)).abs());
        }
        for (w, f) in &other.freqs {
            d = d.max((f - self.freq(w)).abs());
        }
        d
    }
}

/// Normalized counts of the cyclic windows of length `len`.
pub fn cyclic_frequencies(letters: &[Letter], len: usize) -> BTreeMap<Word, f64> {
    let n = letters.len();
    let symbols = letters.iter().map(|l| l.index() + 1).max().unwrap_or(1);
    let dense = (symbols as u64).checked_pow(len as u32).is_some_and(|c| c <= 1 << 22);
    let mut counts: BTreeMap<Vec<Letter>, u64> = BTreeMap::new();
    if dense {
        let size = symbols.pow(len as u32);
        let mut table = alloc::vec![0u64; size];
        let mut code = 0usize;
        for j in 0..len {
            code = code * symbols + letters[j % n].index();
        }
        let top = symbols.pow(len as u32 - 1);
        for i in 0..n {
            table[code] += 1;
            code = (code % top) * symbols + letters[(i + len) % n].index();
        }
        for (mut c, &k) in table.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let mut w = alloc::vec![Letter::from_index(0); len];
            for slot in w.iter_mut().rev() {
                *slot = Letter::from_index(c % symbols);
                c /= symbols;
            }
            counts.insert(w, k);
        }
    } else {
        let mut window: Vec<Letter> = Vec::with_capacity(len);
        for i in 0..n {
            window.clear();
            window.extend((0..len).map(|j| letters[(i + j) % n]));
            match counts.get_mut(window.as_slice()) {
                Some(c) => *c += 1,
                None => {
                    counts.insert(window.clone(), 1);
                }
            }
        }
    }
    counts
        .into_iter()
        .map(|(w, c)| (Word::reduce(w), c as f64 / n as f64))
        .collect()
}

fn dominant_edge(tt: &TrainTrackMap) -> usize {
    let f = &tt.metric().frequencies;
    (0..f.len()).fold(0, |best, i| if f[i] > f[best] { i } else { best })
}

/// `Υ_f^+`: subword frequencies of `[ρ^k(e)]` for the edge `e` of largest
/// Perron weight. Requires `|ρ^k(e')| >= 10 L` for every edge `e'`.
pub fn stable_current(tt: &TrainTrackMap, subpath_len: usize, k: usize) -> Result<CurrentApprox> {
    let n = tt.rank();
    let m = tt.matrix();
    let mut lens: Vec<u128> = alloc::vec![1; n];
    for _ in 0..k {
        lens = (0..n)
            .map(|j| (0..n).fold(0u128, |s, i| s.saturating_add((m.get(i, j) as u128).saturating_mul(lens[i]))))
            .collect();
    }
    let need = 10 * subpath_len as u128;
    if let Some(j) = (0..n).find(|&j| lens[j] < need) {
        return Err(Error::precondition(format!(
            "k = {k} too small: |ρ^k({})| = {} < 10·L = {need}",
            Letter::new(j, false),
            lens[j]
        )));
    }
    let e = dominant_edge(tt);
    let recipe = CurrentRecipe {
        iterate: tt.aut().clone(),
        growth: tt.lambda(),
        base: ConjClass::from_letters(&[Letter::new(e, false)]),
        k,
        translate: FreeGroupAut::identity(n),
    };
    CurrentApprox::from_recipe(recipe, subpath_len)
}

/// `g(η)`, computed on the generating class: `g(η_γ) = η_{g(γ)}`.
pub fn push_current(g: &FreeGroupAut, c: &CurrentApprox) -> Result<CurrentApprox> {
    let recipe = CurrentRecipe { translate: g.compose(&c.recipe.translate), ..c.recipe.clone() };
    CurrentApprox::from_recipe(recipe, c.subpath_len)
}

/// `T^*` for `T = T_f^±`: the stable current of the opposite map.
pub fn dual_current(maps: &MapPair, sign: Sign, subpath_len: usize, k: usize) -> Result<CurrentApprox> {
    stable_current(maps.map(sign.opposite())?, subpath_len, k)
}

/// `⟨T, γ_j⟩ / growth^j` for `j` in `ks`.
pub fn pairing_current_sequence(
    point: TreePoint<'_>,
    recipe: &CurrentRecipe,
    ks: impl IntoIterator<Item = usize>,
) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for k in ks {
        let r = recipe.with_k(k);
        let v = point.length(&r.class())?.value / r.scaling();
        out.push((k, v));
    }
    Ok(out)
}

/// `⟨T, η⟩` at the recipe's depth, with the last step of the quotient
/// sequence as error estimate.
pub fn pairing_current(point: TreePoint<'_>, c: &CurrentApprox) -> Result<PairingEstimate> {
    let k = c.recipe.k;
    let ks = if k == 0 { 0..1 } else { k - 1..k + 1 };
    let seq = pairing_current_sequence(point, &c.recipe, ks)?;
    let value = seq[seq.len() - 1].1;
    if !value.is_finite() {
        return Err(Error::Convergence {
            what: "current pairing".into(),
            partial: seq.iter().map(|x| x.1).collect(),
        });
    }
    let error_estimate = if seq.len() == 2 { (seq[1].1 - seq[0].1).abs() } else { f64::INFINITY };
    Ok(PairingEstimate { value, k_used: k, error_estimate })
}
