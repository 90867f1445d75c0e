//! Conjugacy classes as cyclically reduced words in canonical rotation.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::word::{Basis, Letter, Word};

/// A conjugacy class, stored as the lexicographically least rotation of a
/// cyclically reduced representative. The canonical string is the
/// serialization.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjClass(Vec<Letter>);

impl ConjClass {
    /// Cyclic reduction followed by canonical rotation. The trivial word
    /// gives the empty class.
    pub fn from_word(w: &Word) -> Self {
        Self::from_letters(w.letters())
    }

    /// Same as [`ConjClass::from_word`] for a freely reduced letter slice.
    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut lo = 0;
        let mut hi = letters.len();
        while hi - lo >= 2 && letters[lo] == letters[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        let core = &letters[lo..hi];
        let start = least_rotation(core);
        let mut v = Vec::with_capacity(core.len());
        v.extend_from_slice(&core[start..]);
        v.extend_from_slice(&core[..start]);
        ConjClass(v)
    }

    /// Parses and reduces a class from a symbol string.
    pub fn parse(basis: &Basis, s: &str) -> Result<Self> {
        Ok(Self::from_word(&basis.parse(s)?))
    }

    /// Parses a class and rejects the trivial one.
    pub fn parse_nontrivial(basis: &Basis, s: &str) -> Result<Self> {
        let c = Self::parse(basis, s)?;
        if c.is_trivial() {
            return Err(Error::input(alloc::format!("\"{s}\" is the trivial class")));
        }
        Ok(c)
    }

    #[inline]
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Word length `|α|`.
    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// A representative word (the canonical rotation itself).
    pub fn to_word(&self) -> Word {
        Word::from_reduced(self.0.clone())
    }

    pub fn inverse(&self) -> Self {
        Self::from_word(&self.to_word().inverse())
    }

    /// The class of the `k`-th power, `k >= 1`.
    pub fn pow(&self, k: usize) -> Self {
        let mut v = Vec::with_capacity(self.0.len() * k);
        for _ in 0..k {
            v.extend_from_slice(&self.0);
        }
        Self::from_letters(&v)
    }

    pub(crate) fn rank_needed(&self) -> usize {
        self.0.iter().map(|l| l.generator() + 1).max().unwrap_or(0)
    }

    pub fn checked_for(self, basis: &Basis) -> Result<Self> {
        if self.rank_needed() > basis.rank() {
            return Err(Error::input("class uses letters outside the basis"));
        }
        Ok(self)
    }
}

impl fmt::Display for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl From<&ConjClass> for String {
    fn from(c: &ConjClass) -> String {
        alloc::format!("{c}")
    }
}

/// Start index of a lexicographically least rotation (Booth's algorithm).
pub fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    if n < 2 {
        return 0;
    }
    let at = |i: isize| s[i as usize % n];
    let mut f: Vec<isize> = alloc::vec![-1; 2 * n];
    let mut k: isize = 0;
    for j in 1..(2 * n) as isize {
        let sj = at(j);
        let mut i = f[(j - k - 1) as usize];
        while i != -1 && sj != at(k + i + 1) {
            if sj < at(k + i + 1) {
                k = j - i - 1;
            }
            i = f[i as usize];
        }
        if sj != at(k + i + 1) {
            // i == -1
            if sj < at(k) {
                k = j;
            }
            f[(j - k) as usize] = -1;
        } else {
            f[(j - k) as usize] = i + 1;
        }
    }
    k as usize % n
}

fn is_least_rotation(w: &[Letter]) -> bool {
    let k = least_rotation(w);
    k == 0 || w[k..].iter().chain(&w[..k]).eq(w.iter())
}

/// All nontrivial canonical classes of word length `<= max_len`, ordered by
/// length and then lexicographically.
pub fn classes_up_to(basis: &Basis, max_len: usize) -> Vec<ConjClass> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        out.extend(classes_of_length(basis, len));
    }
    out
}

/// Canonical classes of exactly length `len`, lexicographic order.
pub fn classes_of_length(basis: &Basis, len: usize) -> Vec<ConjClass> {
    let mut out = Vec::new();
    let mut cur: Vec<Letter> = Vec::with_capacity(len);
    extend_reduced(basis, len, &mut cur, &mut |w| {
        if w[0] != w[len - 1].inverse() && is_least_rotation(w) {
            out.push(ConjClass(w.to_vec()));
        }
    });
    out
}

/// Visits every reduced word of the given length in lexicographic order.
pub fn extend_reduced(
    basis: &Basis,
    len: usize,
    cur: &mut Vec<Letter>,
    visit: &mut dyn FnMut(&[Letter]),
) {
    if cur.len() == len {
        if len > 0 {
            visit(cur);
        }
        return;
    }
    for l in basis.letters() {
        if cur.last() == Some(&l.inverse()) {
            continue;
        }
        cur.push(l);
        extend_reduced(basis, len, cur, visit);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn b2() -> Basis {
        Basis::new(2).unwrap()
    }

    fn brute_least_rotation(s: &[Letter]) -> Vec<Letter> {
        (0..s.len().max(1))
            .map(|i| {
                let mut v = s[i.min(s.len())..].to_vec();
                v.extend_from_slice(&s[..i.min(s.len())]);
                v
            })
            .min()
            .unwrap_or_default()
    }

    #[test]
    fn cyclic_reduce_examples() {
        let b = b2();
        assert_eq!(ConjClass::parse(&b, "baB").unwrap().to_string(), "a");
        assert_eq!(ConjClass::parse(&b, "ab").unwrap().to_string(), "ab");
        assert_eq!(ConjClass::parse(&b, "ba").unwrap().to_string(), "ab");
        assert!(ConjClass::parse(&b, "abBA").unwrap().is_trivial());
        assert!(ConjClass::parse_nontrivial(&b, "aA").is_err());
    }

    #[test]
    fn short_class_counts() {
        let b = b2();
        // length 1: a, A, b, B; length 2: aa, ab, aB, AA, Ab, AB, bb, BB
        assert_eq!(classes_of_length(&b, 1).len(), 4);
        assert_eq!(classes_of_length(&b, 2).len(), 8);
        let all = classes_up_to(&b, 4);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
    }

    proptest! {
        #[test]
        fn booth_matches_brute_force(v in proptest::collection::vec(0usize..4, 0..30)) {
            let s: Vec<Letter> = v.into_iter().map(Letter::from_index).collect();
            let k = least_rotation(&s);
            let mut rot = s[k..].to_vec();
            rot.extend_from_slice(&s[..k]);
            prop_assert_eq!(rot, brute_least_rotation(&s));
        }

        #[test]
        fn class_is_conjugation_invariant(
            v in proptest::collection::vec(0usize..6, 1..20),
            c in proptest::collection::vec(0usize..6, 0..8),
        ) {
            let b = Basis::new(3).unwrap();
            let w = Word::reduce(v.into_iter().map(Letter::from_index));
            let cw = Word::reduce(c.into_iter().map(Letter::from_index));
            let class = ConjClass::from_word(&w);
            prop_assert_eq!(ConjClass::from_word(&w.conjugate_by(&cw)), class.clone());
            let canon = class.letters();
            if canon.len() >= 2 {
                prop_assert!(canon[0] != canon[canon.len() - 1].inverse());
            }
            let _ = b;
        }
    }
}
