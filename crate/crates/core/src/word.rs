//! Letters, freely reduced words and the free basis they live over.
//!
//! Letters are written `a..z` for basis elements and `A..Z` for their
//! inverses. The fixed total order on symbols is
//! `x_1 < x_1^{-1} < x_2 < x_2^{-1} < ...`, i.e. `a < A < b < B < ...`.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};

/// Maximum supported rank (one lowercase letter per generator).
pub const MAX_RANK: usize = 26;

/// A signed basis symbol.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(u8);

impl Letter {
    /// Letter for generator `generator` (0-based), inverted when `inverse`.
    pub const fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator as u8) << 1 | inverse as u8)
    }

    /// Position in the fixed symbol order; also the direction index at the
    /// vertex of a rose.
    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub const fn from_index(index: usize) -> Self {
        Letter(index as u8)
    }

    #[inline]
    pub const fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub const fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub const fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + self.generator() as u8) as char;
        if self.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a'..='z' => Some(Letter::new(c as usize - 'a' as usize, false)),
            'A'..='Z' => Some(Letter::new(c as usize - 'A' as usize, true)),
            _ => None,
        }
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Free basis of rank `n >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Basis {
    rank: usize,
}

impl Basis {
    pub fn new(rank: usize) -> Result<Self> {
        if !(2..=MAX_RANK).contains(&rank) {
            return Err(Error::input(alloc::format!(
                "rank must be between 2 and {MAX_RANK}, got {rank}"
            )));
        }
        Ok(Basis { rank })
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The `2n` signed symbols in the fixed order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + Clone {
        (0..2 * self.rank).map(Letter::from_index)
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.generator() < self.rank
    }

    /// Parses a symbol string without reducing it.
    pub fn parse_raw(&self, s: &str) -> Result<Vec<Letter>> {
        let mut out = Vec::with_capacity(s.len());
        for (pos, c) in s.chars().enumerate() {
            let letter = Letter::from_char(c).filter(|l| self.contains(*l)).ok_or_else(|| {
                Error::input(alloc::format!(
                    "invalid symbol '{c}' at position {} in \"{s}\" (rank {})",
                    pos + 1,
                    self.rank
                ))
            })?;
            out.push(letter);
        }
        Ok(out)
    }

    /// Parses and freely reduces a word.
    pub fn parse(&self, s: &str) -> Result<Word> {
        Ok(Word::reduce(self.parse_raw(s)?))
    }

    pub fn generator(&self, i: usize) -> Word {
        Word(alloc::vec![Letter::new(i, false)])
    }
}

/// A freely reduced word.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub const fn empty() -> Self {
        Word(Vec::new())
    }

    /// Freely reduces a symbol sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out = Vec::new();
        for l in letters {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    /// Wraps letters already known to be reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(is_reduced(&letters));
        Word(letters)
    }

    #[inline]
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &Word) -> Self {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    /// Reduced power; negative exponents invert.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Vec::new();
        for _ in 0..k.unsigned_abs() {
            for &l in &base.0 {
                push_reduced(&mut out, l);
            }
        }
        Word(out)
    }

    /// Reduced conjugate `w · self · w^{-1}`.
    pub fn conjugate_by(&self, w: &Word) -> Self {
        w.mul(self).mul(&w.inverse())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

#[inline]
pub(crate) fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

pub fn is_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|w| w[0] != w[1].inverse())
}

pub fn letters_to_string(letters: &[Letter]) -> String {
    letters.iter().map(|l| l.to_char()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn b2() -> Basis {
        Basis::new(2).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let b = b2();
        assert_eq!(b.parse("abBa").unwrap().to_string(), "aa");
        assert_eq!(b.parse("").unwrap().to_string(), "");
        assert_eq!(b.parse("aA").unwrap().to_string(), "");
    }

    #[test]
    fn unknown_symbol_is_input_error() {
        let b = b2();
        assert!(b.parse("abc").is_err());
        assert!(b.parse("ab#").is_err());
        let err = b.parse("abX#").unwrap_err();
        assert!(alloc::format!("{err}").contains("position 3"));
    }

    #[test]
    fn symbol_order() {
        let order: String = b2().letters().map(|l| l.to_char()).collect();
        assert_eq!(order, "aAbB");
        assert!(Letter::from_char('A').unwrap() < Letter::from_char('b').unwrap());
    }

    #[test]
    fn rank_bounds() {
        assert!(Basis::new(1).is_err());
        assert!(Basis::new(27).is_err());
        assert!(Basis::new(3).is_ok());
    }

    fn raw_word(rank: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
        proptest::collection::vec(0..2 * rank, 0..max_len)
            .prop_map(|v| v.into_iter().map(Letter::from_index).collect())
    }

    proptest! {
        #[test]
        fn reduce_properties(u in raw_word(3, 24), v in raw_word(3, 24)) {
            let wu = Word::reduce(u.iter().copied());
            let wv = Word::reduce(v.iter().copied());
            // idempotent
            prop_assert_eq!(Word::reduce(wu.letters().iter().copied()), wu.clone());
            prop_assert!(is_reduced(wu.letters()));
            // |reduce(uv)| <= |u| + |v|
            let uv = Word::reduce(u.iter().chain(v.iter()).copied());
            prop_assert!(uv.len() <= u.len() + v.len());
            prop_assert_eq!(uv, wu.mul(&wv));
            // w w^{-1} = 1
            prop_assert!(wu.mul(&wu.inverse()).is_empty());
        }
    }
}
