//! Train track maps on the rose: legal structure, transition matrix,
//! Perron–Frobenius data, bounded cancellation, tightened iteration and
//! legality.
//!
//! The rose has one vertex and one petal per generator; the directions at
//! the vertex are the `2n` letters, so an edge path is a word and the turn
//! crossed between consecutive letters `x y` is `{x^{-1}, y}`.

mod path;

use alloc::format;
use alloc::vec::Vec;

pub use path::CyclicPath;

use crate::aut::FreeGroupAut;
use crate::class::ConjClass;
use crate::error::{Error, Result};
use crate::linalg::{self, NonnegMatrix};
use crate::word::{is_reduced, Basis, Letter, Word};

/// Transition matrix: entry `(i, j)` counts occurrences of generator `i`,
/// in either direction, in the image of generator `j`.
pub type TransitionMatrix = NonnegMatrix;

/// Unordered pair of directions at the vertex.
pub type Turn = (Letter, Letter);

#[inline]
fn turn(x: Letter, y: Letter) -> Turn {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// Turn crossed between consecutive letters `x y`.
#[inline]
pub fn turn_between(x: Letter, y: Letter) -> Turn {
    turn(x.inverse(), y)
}

/// Direction map and the illegal turns it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegalStructure {
    rank: usize,
    direction_map: Vec<Letter>,
    /// `collapse[x][y]` is the least `k >= 1` with `D^k x = D^k y`, or 0 if
    /// the pair is never identified (or `x == y`).
    collapse: Vec<u32>,
}

impl LegalStructure {
    /// Iterates the direction map `D(d) = first letter of ρ(d)` on pairs of
    /// directions until every pair orbit has become periodic.
    pub fn from_images(rank: usize, images: &[Vec<Letter>]) -> Self {
        let m = 2 * rank;
        let direction_map: Vec<Letter> = (0..m)
            .map(|d| {
                let x = Letter::from_index(d);
                let img = &images[x.generator()];
                if x.is_inverse() {
                    img[img.len() - 1].inverse()
                } else {
                    img[0]
                }
            })
            .collect();
        let mut collapse = alloc::vec![0u32; m * m];
        let bound = m * m;
        for x in 0..m {
            for y in 0..m {
                if x == y {
                    continue;
                }
                let (mut u, mut v) = (x, y);
                for k in 1..=bound {
                    u = direction_map[u].index();
                    v = direction_map[v].index();
                    if u == v {
                        collapse[x * m + y] = k as u32;
                        break;
                    }
                }
            }
        }
        LegalStructure { rank, direction_map, collapse }
    }

    pub fn direction_map(&self) -> &[Letter] {
        &self.direction_map
    }

    #[inline]
    pub fn is_illegal(&self, t: Turn) -> bool {
        self.collapse[t.0.index() * 2 * self.rank + t.1.index()] > 0
    }

    /// Number of direction-map iterates after which an illegal turn
    /// degenerates.
    pub fn collapse_time(&self, t: Turn) -> Option<usize> {
        match self.collapse[t.0.index() * 2 * self.rank + t.1.index()] {
            0 => None,
            k => Some(k as usize),
        }
    }

    /// Illegal turns with the smaller direction first, sorted.
    pub fn illegal_turns(&self) -> Vec<Turn> {
        let m = 2 * self.rank;
        let mut out = Vec::new();
        for x in 0..m {
            for y in x + 1..m {
                let t = (Letter::from_index(x), Letter::from_index(y));
                if self.is_illegal(t) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// True iff the linear path crosses no illegal turn.
    pub fn is_legal_path(&self, letters: &[Letter]) -> bool {
        letters.windows(2).all(|w| !self.is_illegal(turn_between(w[0], w[1])))
    }

    /// True iff the loop crosses no illegal turn, including the wraparound.
    pub fn is_legal_loop(&self, letters: &[Letter]) -> bool {
        match (letters.first(), letters.last()) {
            (Some(&f), Some(&l)) => {
                self.is_legal_path(letters) && !self.is_illegal(turn_between(l, f))
            }
            _ => true,
        }
    }
}

/// Where a candidate map fails to be a train track.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Offense {
    /// Generator whose image crosses an illegal turn.
    pub edge: usize,
    /// Position of the turn inside the image (between letters `p` and `p+1`).
    pub position: usize,
    pub turn: Turn,
    /// First iterate `ρ^k` not locally injective on the edge.
    pub iterate: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainTrackCheck {
    pub legal: LegalStructure,
    pub offense: Option<Offense>,
}

impl TrainTrackCheck {
    pub fn is_train_track(&self) -> bool {
        self.offense.is_none()
    }
}

/// Checks the train track property for rose images given as raw letter
/// sequences. An unreduced image is an input error.
pub fn check_train_track(rank: usize, images: &[Vec<Letter>]) -> Result<TrainTrackCheck> {
    if images.len() != rank {
        return Err(Error::input(format!("expected {rank} edge images, got {}", images.len())));
    }
    for (i, img) in images.iter().enumerate() {
        if img.is_empty() {
            return Err(Error::input(format!("edge {} has an empty image", Letter::new(i, false))));
        }
        if img.iter().any(|l| l.generator() >= rank) {
            return Err(Error::input(format!("edge {} image leaves the basis", Letter::new(i, false))));
        }
        if !is_reduced(img) {
            return Err(Error::input(format!(
                "edge {} image {} is not reduced",
                Letter::new(i, false),
                crate::word::letters_to_string(img)
            )));
        }
    }
    let legal = LegalStructure::from_images(rank, images);
    let mut offense = None;
    'edges: for (i, img) in images.iter().enumerate() {
        for (p, w) in img.windows(2).enumerate() {
            let t = turn_between(w[0], w[1]);
            if let Some(k) = legal.collapse_time(t) {
                offense = Some(Offense { edge: i, position: p, turn: t, iterate: k + 1 });
                break 'edges;
            }
        }
    }
    Ok(TrainTrackCheck { legal, offense })
}

/// Transition matrix of the rose map determined by `f`.
pub fn transition_matrix(f: &FreeGroupAut) -> TransitionMatrix {
    let n = f.rank();
    let mut e = alloc::vec![0u64; n * n];
    for (j, img) in f.images().iter().enumerate() {
        for l in img.letters() {
            e[l.generator() * n + j] += 1;
        }
    }
    NonnegMatrix::new(n, e)
}

/// Growth rate and eigen-metric.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenMetric {
    pub lambda: f64,
    /// Lengths with `|ρ(e)| = λ · len(e)`, summing to 1.
    pub edge_lengths: Vec<f64>,
    /// Right Perron vector `M v = λ v`, summing to 1: asymptotic letter
    /// frequencies of iterated images.
    pub frequencies: Vec<f64>,
    /// Larger of the two eigen-equation residuals, relative to `‖v‖∞`.
    pub residual: f64,
    pub tolerance: f64,
    pub iterations: usize,
}

impl EigenMetric {
    pub fn max_edge_length(&self) -> f64 {
        self.edge_lengths.iter().fold(0.0f64, |m, &x| m.max(x))
    }

    pub fn metric_length(&self, letters: &[Letter]) -> f64 {
        letters.iter().map(|l| self.edge_lengths[l.generator()]).sum()
    }
}

/// Perron–Frobenius data of a primitive transition matrix, by power
/// iteration from the all-ones vector.
pub fn growth_rate(m: &TransitionMatrix, tol: f64) -> Result<EigenMetric> {
    let right = linalg::perron_right(m, tol, linalg::DEFAULT_MAX_ITER)?;
    let left = linalg::perron_left(m, tol, linalg::DEFAULT_MAX_ITER)?;
    Ok(EigenMetric {
        lambda: right.value,
        edge_lengths: left.vector,
        frequencies: right.vector,
        residual: right.residual.max(left.residual),
        tolerance: tol,
        iterations: right.iterations.max(left.iterations),
    })
}

/// Maximal number of letters cancelled when tightening `ρ(x)ρ(y)` over all
/// reduced two-letter paths `x y`.
pub fn cancellation_bound(f: &FreeGroupAut) -> usize {
    let basis = Basis::new(f.rank()).expect("automorphism rank is valid");
    let mut k0 = 0;
    for x in basis.letters() {
        let fx = f.image_of(x);
        for y in basis.letters() {
            if y == x.inverse() {
                continue;
            }
            let fy = f.image_of(y);
            let joined = fx.mul(&fy);
            k0 = k0.max((fx.len() + fy.len() - joined.len()) / 2);
        }
    }
    k0
}

/// Bounded cancellation constant in metric units, `K0 · ℓmax · λ/(λ−1)`.
pub fn bounded_cancellation(k0: usize, max_edge_length: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 1.0) {
        return Err(Error::precondition(format!("growth rate {lambda} must exceed 1")));
    }
    Ok(k0 as f64 * max_edge_length * lambda / (lambda - 1.0))
}

/// Critical constant `C = 2 · Kbcc / (λ − 1) + 1`.
pub fn critical_constant(kbcc: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 1.0) {
        return Err(Error::precondition(format!("growth rate {lambda} must exceed 1")));
    }
    Ok(2.0 * kbcc / (lambda - 1.0) + 1.0)
}

/// A verified train track representative on the rose, with its derived
/// data.
#[derive(Clone, Debug)]
pub struct TrainTrackMap {
    aut: FreeGroupAut,
    legal: LegalStructure,
    matrix: TransitionMatrix,
    metric: EigenMetric,
    /// Images of all `2n` letters, indexed by `Letter::index`.
    letter_images: Vec<Vec<Letter>>,
    k0: usize,
    kbcc: f64,
    critical: f64,
}

impl TrainTrackMap {
    pub fn new(aut: FreeGroupAut) -> Result<Self> {
        Self::with_tolerance(aut, linalg::DEFAULT_TOL)
    }

    /// Fails with an input error if `aut` is not a train track on the rose,
    /// and with [`Error::NotIrreducible`] if its matrix is not primitive.
    pub fn with_tolerance(aut: FreeGroupAut, tol: f64) -> Result<Self> {
        let rank = aut.rank();
        let raw: Vec<Vec<Letter>> = aut.images().iter().map(|w| w.letters().to_vec()).collect();
        let check = check_train_track(rank, &raw)?;
        if let Some(o) = &check.offense {
            return Err(Error::input(format!(
                "not a train track: image of {} crosses the illegal turn {{{}, {}}} (ρ^{} not locally injective)",
                Letter::new(o.edge, false),
                o.turn.0,
                o.turn.1,
                o.iterate
            )));
        }
        let matrix = transition_matrix(&aut);
        let metric = growth_rate(&matrix, tol)?;
        let k0 = cancellation_bound(&aut);
        let kbcc = bounded_cancellation(k0, metric.max_edge_length(), metric.lambda)?;
        let critical = critical_constant(kbcc, metric.lambda)?;
        let letter_images = (0..2 * rank)
            .map(|d| aut.image_of(Letter::from_index(d)).into_letters())
            .collect();
        Ok(TrainTrackMap { aut, legal: check.legal, matrix, metric, letter_images, k0, kbcc, critical })
    }

    pub fn aut(&self) -> &FreeGroupAut {
        &self.aut
    }

    pub fn rank(&self) -> usize {
        self.aut.rank()
    }

    pub fn basis(&self) -> Basis {
        Basis::new(self.rank()).expect("automorphism rank is valid")
    }

    pub fn legal(&self) -> &LegalStructure {
        &self.legal
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    pub fn metric(&self) -> &EigenMetric {
        &self.metric
    }

    pub fn lambda(&self) -> f64 {
        self.metric.lambda
    }

    pub fn k0(&self) -> usize {
        self.k0
    }

    /// Bounded cancellation constant in metric units.
    pub fn kbcc(&self) -> f64 {
        self.kbcc
    }

    pub fn critical_constant(&self) -> f64 {
        self.critical
    }

    pub(crate) fn letter_image(&self, l: Letter) -> &[Letter] {
        &self.letter_images[l.index()]
    }

    pub fn metric_length(&self, letters: &[Letter]) -> f64 {
        self.metric.metric_length(letters)
    }

    /// `[ρ^N(α)]`, one substitution and cyclic reduction per step.
    pub fn iterate_tighten(&self, alpha: &ConjClass, n: usize) -> ConjClass {
        let mut cur = alpha.clone();
        for _ in 0..n {
            cur = self.aut.apply_class(&cur);
        }
        cur
    }

    /// Tightened image `[ρ(w)]` of a word.
    pub fn image(&self, w: &Word) -> Word {
        self.aut.apply(w)
    }

    /// Maximal legal segments of a nontrivial cyclic word as
    /// `(start, len)` pairs on the cycle; a single segment covering the
    /// whole loop when it is legal.
    pub fn legal_segments(&self, letters: &[Letter]) -> Vec<(usize, usize)> {
        let m = letters.len();
        let cuts: Vec<usize> = (0..m)
            .filter(|&i| self.legal.is_illegal(turn_between(letters[i], letters[(i + 1) % m])))
            .collect();
        if cuts.is_empty() {
            return alloc::vec![(0, m)];
        }
        let mut out = Vec::with_capacity(cuts.len());
        for (j, &c) in cuts.iter().enumerate() {
            let next = cuts[(j + 1) % cuts.len()];
            let start = (c + 1) % m;
            let len = if next > c { next - c } else { next + m - c };
            out.push((start, len));
        }
        out
    }

    /// Fraction of the metric length of `α` carried by maximal legal
    /// segments of metric length at least the critical constant.
    pub fn legality(&self, alpha: &ConjClass) -> Result<f64> {
        self.legality_with(alpha, self.critical)
    }

    pub fn legality_with(&self, alpha: &ConjClass, c: f64) -> Result<f64> {
        if alpha.is_trivial() {
            return Err(Error::input("legality of the trivial class"));
        }
        let letters = alpha.letters();
        let m = letters.len();
        let total = self.metric_length(letters);
        let mut long = 0.0;
        for (start, len) in self.legal_segments(letters) {
            let seg: f64 = (0..len).map(|i| self.metric.edge_lengths[letters[(start + i) % m].generator()]).sum();
            if seg >= c {
                long += seg;
            }
        }
        Ok((long / total).clamp(0.0, 1.0))
    }
}
