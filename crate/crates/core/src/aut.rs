//! Automorphisms of `F_n` given by basis images, outer-class fingerprints and
//! ball enumeration in `Out(F_n)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::class::{classes_up_to, ConjClass};
use crate::error::{Error, Result};
use crate::word::{push_reduced, Basis, Letter, Word};

/// An endomorphism of `F_n` by images of the positive basis letters, with
/// optional user-supplied inverse. When the inverse is present, construction
/// certifies that composing the two is inner.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreeGroupAut {
    images: Vec<Word>,
    inverse_images: Option<Vec<Word>>,
}

impl FreeGroupAut {
    /// Builds a map from images; `inverse_images`, when given, must certify
    /// invertibility.
    pub fn new(images: Vec<Word>, inverse_images: Option<Vec<Word>>) -> Result<Self> {
        let rank = images.len();
        Basis::new(rank)?;
        if images.iter().any(|w| w.is_empty()) {
            return Err(Error::input("an image of a basis letter is trivial"));
        }
        let check_rank = |ws: &[Word]| {
            ws.iter()
                .flat_map(|w| w.letters())
                .all(|l| l.generator() < rank)
        };
        if !check_rank(&images) {
            return Err(Error::input("image uses letters outside the basis"));
        }
        if let Some(inv) = &inverse_images {
            if inv.len() != rank || !check_rank(inv) {
                return Err(Error::input("inverse images do not match the rank"));
            }
            let f = FreeGroupAut { images: images.clone(), inverse_images: None };
            let g = FreeGroupAut { images: inv.clone(), inverse_images: None };
            if f.compose(&g).is_inner().is_none() {
                return Err(Error::input(
                    "inverse_images do not invert images (composition is not inner)",
                ));
            }
        }
        Ok(FreeGroupAut { images, inverse_images })
    }

    /// Parses image strings (`a..z`, `A..Z` for inverses).
    pub fn parse(rank: usize, images: &[&str], inverse_images: Option<&[&str]>) -> Result<Self> {
        let basis = Basis::new(rank)?;
        if images.len() != rank {
            return Err(Error::input(alloc::format!(
                "expected {rank} images, got {}",
                images.len()
            )));
        }
        let im = images.iter().map(|s| basis.parse(s)).collect::<Result<Vec<_>>>()?;
        let inv = inverse_images
            .map(|v| v.iter().map(|s| basis.parse(s)).collect::<Result<Vec<_>>>())
            .transpose()?;
        Self::new(im, inv)
    }

    pub fn identity(rank: usize) -> Self {
        let images: Vec<Word> = (0..rank)
            .map(|i| Word::from_reduced(alloc::vec![Letter::new(i, false)]))
            .collect();
        FreeGroupAut { inverse_images: Some(images.clone()), images }
    }

    /// Inner automorphism `x ↦ w x w^{-1}`.
    pub fn inner(rank: usize, w: &Word) -> Self {
        let images: Vec<Word> = (0..rank)
            .map(|i| Word::from_reduced(alloc::vec![Letter::new(i, false)]).conjugate_by(w))
            .collect();
        let winv = w.inverse();
        let inverse: Vec<Word> = (0..rank)
            .map(|i| Word::from_reduced(alloc::vec![Letter::new(i, false)]).conjugate_by(&winv))
            .collect();
        FreeGroupAut { images, inverse_images: Some(inverse) }
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> Option<&[Word]> {
        self.inverse_images.as_deref()
    }

    /// The inverse automorphism, when the inverse images are known.
    pub fn inverse(&self) -> Option<Self> {
        self.inverse_images.as_ref().map(|inv| FreeGroupAut {
            images: inv.clone(),
            inverse_images: Some(self.images.clone()),
        })
    }

    /// Image of one symbol (inverse symbols map to inverted images).
    pub fn image_of(&self, l: Letter) -> Word {
        let w = &self.images[l.generator()];
        if l.is_inverse() {
            w.inverse()
        } else {
            w.clone()
        }
    }

    fn push_image(&self, out: &mut Vec<Letter>, l: Letter) {
        let w = self.images[l.generator()].letters();
        if l.is_inverse() {
            for &x in w.iter().rev() {
                push_reduced(out, x.inverse());
            }
        } else {
            for &x in w {
                push_reduced(out, x);
            }
        }
    }

    /// Reduced image of a word.
    pub fn apply(&self, w: &Word) -> Word {
        self.apply_letters(w.letters())
    }

    pub fn apply_letters(&self, letters: &[Letter]) -> Word {
        let mut out = Vec::with_capacity(letters.len() * 2);
        for &l in letters {
            self.push_image(&mut out, l);
        }
        Word::from_reduced(out)
    }

    /// Image of a conjugacy class (independent of the representative).
    pub fn apply_class(&self, c: &ConjClass) -> ConjClass {
        ConjClass::from_word(&self.apply_letters(c.letters()))
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &FreeGroupAut) -> FreeGroupAut {
        debug_assert_eq!(self.rank(), other.rank());
        let images = other.images.iter().map(|w| self.apply(w)).collect();
        let inverse_images = match (&self.inverse_images, &other.inverse_images) {
            (Some(si), Some(oi)) => {
                let sinv = FreeGroupAut { images: si.clone(), inverse_images: None };
                let oinv = FreeGroupAut { images: oi.clone(), inverse_images: None };
                Some(oinv.compose(&sinv).images)
            }
            _ => None,
        };
        FreeGroupAut { images, inverse_images }
    }

    /// `self^k` for `k >= 0`; negative powers need the inverse.
    pub fn pow(&self, k: i64) -> Result<FreeGroupAut> {
        let base = if k < 0 {
            self.inverse()
                .ok_or_else(|| Error::input("negative power of a map without inverse_images"))?
        } else {
            self.clone()
        };
        let mut acc = FreeGroupAut::identity(self.rank());
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base);
        }
        Ok(acc)
    }

    /// If `self` is inner, returns the conjugator `w` with
    /// `self(x_i) = w x_i w^{-1}` for every basis letter.
    pub fn is_inner(&self) -> Option<Word> {
        let x1 = Letter::new(0, false);
        let img = self.images[0].letters();
        // img must read v x1 v^{-1}
        if img.len().is_multiple_of(2) {
            return None;
        }
        let h = img.len() / 2;
        if img[h] != x1 {
            return None;
        }
        if (0..h).any(|i| img[i] != img[img.len() - 1 - i].inverse()) {
            return None;
        }
        let v = Word::from_reduced(img[..h].to_vec());
        let bound = self.images.iter().map(|w| w.len()).max().unwrap_or(0) as i64;
        let x1w = Word::from_reduced(alloc::vec![x1]);
        let mut ks: Vec<i64> = alloc::vec![0];
        for k in 1..=bound {
            ks.push(k);
            ks.push(-k);
        }
        for k in ks {
            let w = v.mul(&x1w.pow(k));
            let ok = (0..self.rank()).all(|i| {
                let xi = Word::from_reduced(alloc::vec![Letter::new(i, false)]);
                xi.conjugate_by(&w) == self.images[i]
            });
            if ok {
                return Some(w);
            }
        }
        None
    }

    /// Images of all canonical classes of length `<= 2`.
    pub fn fingerprint(&self) -> OuterFingerprint {
        let basis = Basis::new(self.rank()).expect("rank validated at construction");
        let entries = fingerprint_domain(&basis)
            .into_iter()
            .map(|c| {
                let img = self.apply_class(&c);
                (c, img)
            })
            .collect();
        OuterFingerprint { entries }
    }
}

impl fmt::Debug for FreeGroupAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}→{}", Letter::new(i, false), w)?;
        }
        write!(f, ")")
    }
}

/// Images of the finite set of canonical classes of length `<= 2`; equal
/// fingerprints identify outer classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OuterFingerprint {
    entries: Vec<(ConjClass, ConjClass)>,
}

impl OuterFingerprint {
    pub fn entries(&self) -> &[(ConjClass, ConjClass)] {
        &self.entries
    }
}

/// The domain of [`FreeGroupAut::fingerprint`].
pub fn fingerprint_domain(basis: &Basis) -> Vec<ConjClass> {
    classes_up_to(basis, 2)
}

/// Breadth-first ball of radius `radius` in the group generated by `gens`,
/// deduplicated by outer class. Element `0` is the identity; within a level,
/// order follows generator order. Returns `(element, word length)` pairs.
pub fn enumerate_ball_with_depth(
    gens: &[FreeGroupAut],
    radius: usize,
) -> Result<Vec<(FreeGroupAut, usize)>> {
    let rank = match gens.first() {
        Some(g) => g.rank(),
        None => return Err(Error::input("empty generator set")),
    };
    if gens.iter().any(|g| g.inverse_images.is_none() || g.rank() != rank) {
        return Err(Error::input(
            "every ball generator needs inverse_images and a common rank",
        ));
    }
    let id = FreeGroupAut::identity(rank);
    let mut seen: BTreeMap<OuterFingerprint, ()> = BTreeMap::new();
    seen.insert(id.fingerprint(), ());
    let mut out = alloc::vec![(id, 0usize)];
    let mut frontier = 0..1;
    for depth in 1..=radius {
        let start = out.len();
        for idx in frontier.clone() {
            for g in gens {
                let h = out[idx].0.compose(g);
                let fp = h.fingerprint();
                if seen.insert(fp, ()).is_none() {
                    out.push((h, depth));
                }
            }
        }
        frontier = start..out.len();
        if frontier.is_empty() {
            break;
        }
    }
    Ok(out)
}

/// [`enumerate_ball_with_depth`] without the depths.
pub fn enumerate_ball(gens: &[FreeGroupAut], radius: usize) -> Result<Vec<FreeGroupAut>> {
    Ok(enumerate_ball_with_depth(gens, radius)?
        .into_iter()
        .map(|(g, _)| g)
        .collect())
}

/// Nielsen-type generators of `Out(F_n)`, closed under inversion: the
/// transvection `x_1 ↦ x_1 x_2` and its inverse, transpositions
/// `x_i ↔ x_{i+1}`, and the inversion of `x_1`.
pub fn nielsen_generators(rank: usize) -> Result<Vec<FreeGroupAut>> {
    let basis = Basis::new(rank)?;
    let gen = |i: usize| basis.generator(i);
    let with = |i: usize, w: Word| {
        let mut v: Vec<Word> = (0..rank).map(gen).collect();
        v[i] = w;
        v
    };
    let mut out = Vec::new();
    let t = with(0, gen(0).mul(&gen(1)));
    let tinv = with(0, gen(0).mul(&gen(1).inverse()));
    out.push(FreeGroupAut::new(t.clone(), Some(tinv.clone()))?);
    out.push(FreeGroupAut::new(tinv, Some(t))?);
    for i in 0..rank - 1 {
        let mut v: Vec<Word> = (0..rank).map(gen).collect();
        v.swap(i, i + 1);
        out.push(FreeGroupAut::new(v.clone(), Some(v))?);
    }
    let inv = with(0, gen(0).inverse());
    out.push(FreeGroupAut::new(inv.clone(), Some(inv))?);
    Ok(out)
}
