//! Finite stand-ins for points at infinity: stable trees as length
//! functions on a test set of classes, stable currents as subword
//! frequencies, and the pairing between them.
//!
//! Trees act on the right: `⟨T·g, γ⟩ = ⟨T, g(γ)⟩` and `(T·g)·h = T·(g∘h)`.

pub mod current;
mod experiments;

use alloc::format;
use alloc::vec::Vec;

pub use current::{
    dual_current, pairing_current, pairing_current_sequence, push_current, stable_current,
    CurrentApprox, CurrentRecipe,
};
pub use experiments::{
    scaling_diagnostic, t2_experiment, ScalingReport, ScalingRow, T2Report, T2Row,
};

use crate::aut::FreeGroupAut;
use crate::class::{classes_of_length, classes_up_to, ConjClass};
use crate::error::{Error, Result};
use crate::train_track::{CyclicPath, TrainTrackMap};
use crate::whitehead::is_primitive;
use crate::word::Basis;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_KMAX: usize = 60;

/// A limit value with its truncation data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairingEstimate {
    pub value: f64,
    pub k_used: usize,
    /// Size of the last step of the defining sequence.
    pub error_estimate: f64,
}

/// Something with a length function on conjugacy classes.
pub trait LengthOracle {
    fn rank(&self) -> usize;
    fn length(&self, alpha: &ConjClass) -> Result<PairingEstimate>;
}

/// `T_f^+` for a train track representative `f`: the limit of
/// `metric-length([ρ^k(α)]) / λ^k`. The unstable tree `T_f^-` is the stable
/// tree of a train track representative of `f^{-1}`.
#[derive(Clone, Debug)]
pub struct StableTree {
    tt: TrainTrackMap,
    tol: f64,
    kmax: usize,
}

impl StableTree {
    pub fn new(tt: TrainTrackMap) -> Self {
        Self::with_limits(tt, DEFAULT_TOL, DEFAULT_KMAX)
    }

    pub fn with_limits(tt: TrainTrackMap, tol: f64, kmax: usize) -> Self {
        StableTree { tt, tol, kmax }
    }

    pub fn map(&self) -> &TrainTrackMap {
        &self.tt
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }
}

impl LengthOracle for StableTree {
    fn rank(&self) -> usize {
        self.tt.rank()
    }

    fn length(&self, alpha: &ConjClass) -> Result<PairingEstimate> {
        stable_tree_length(&self.tt, alpha, self.tol, self.kmax)
    }
}

/// `⟨T_f^+, α⟩` by iterating until successive normalized lengths differ by
/// less than `tol · max(1, s_k)`.
pub fn stable_tree_length(
    tt: &TrainTrackMap,
    alpha: &ConjClass,
    tol: f64,
    kmax: usize,
) -> Result<PairingEstimate> {
    if alpha.is_trivial() {
        return Err(Error::input("stable length of the trivial class"));
    }
    let lengths = &tt.metric().edge_lengths;
    let lambda = tt.lambda();
    let mut path = CyclicPath::new(tt, alpha)?;
    let mut prev = path.metric_length(lengths);
    let mut seq = alloc::vec![prev];
    let mut scale = 1.0;
    for k in 1..=kmax {
        path.step(tt)?;
        scale *= lambda;
        let s = path.metric_length(lengths) / scale;
        seq.push(s);
        let delta = (s - prev).abs();
        if delta < tol * s.max(1.0) {
            return Ok(PairingEstimate { value: s, k_used: k, error_estimate: delta });
        }
        prev = s;
    }
    Err(Error::Convergence { what: format!("stable length of a class of length {}", alpha.len()), partial: seq })
}

/// Lengths in a fixed metric on the rose; zero lengths give simplicial
/// trees in the boundary (the generators of zero length are elliptic).
#[derive(Clone, Debug, PartialEq)]
pub struct RoseMetric {
    lengths: Vec<f64>,
}

impl RoseMetric {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        if lengths.len() < 2 || lengths.iter().any(|&l| !(l >= 0.0)) || lengths.iter().all(|&l| l == 0.0) {
            return Err(Error::input("rose lengths must be nonnegative, not all zero, rank >= 2"));
        }
        Ok(RoseMetric { lengths })
    }

    /// All petals of length 1.
    pub fn standard(rank: usize) -> Self {
        RoseMetric { lengths: alloc::vec![1.0; rank] }
    }

    /// The petals listed in `collapsed` get length 0.
    pub fn collapsed(rank: usize, collapsed: &[usize]) -> Result<Self> {
        let mut lengths = alloc::vec![1.0; rank];
        for &i in collapsed {
            if i >= rank {
                return Err(Error::input(format!("generator {i} out of range")));
            }
            lengths[i] = 0.0;
        }
        Self::new(lengths)
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }
}

impl LengthOracle for RoseMetric {
    fn rank(&self) -> usize {
        self.lengths.len()
    }

    fn length(&self, alpha: &ConjClass) -> Result<PairingEstimate> {
        let value = alpha.letters().iter().map(|l| self.lengths[l.generator()]).sum();
        Ok(PairingEstimate { value, k_used: 0, error_estimate: 0.0 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn opposite(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Train track representatives of `f` and, optionally, of `f^{-1}`.
#[derive(Clone, Debug)]
pub struct MapPair {
    forward: TrainTrackMap,
    backward: Option<TrainTrackMap>,
}

impl MapPair {
    /// `backward` must represent the inverse of `forward` in `Out(F_n)`.
    pub fn new(forward: TrainTrackMap, backward: Option<TrainTrackMap>) -> Result<Self> {
        if let Some(b) = &backward {
            if b.rank() != forward.rank() || forward.aut().compose(b.aut()).is_inner().is_none() {
                return Err(Error::input("inverse train track does not represent the inverse outer class"));
            }
        }
        Ok(MapPair { forward, backward })
    }

    pub fn map(&self, sign: Sign) -> Result<&TrainTrackMap> {
        match sign {
            Sign::Plus => Ok(&self.forward),
            Sign::Minus => self
                .backward
                .as_ref()
                .ok_or_else(|| Error::input("the unstable side needs an inverse train track map")),
        }
    }

    /// `T_f^+` or `T_f^-`.
    pub fn tree(&self, sign: Sign, tol: f64, kmax: usize) -> Result<StableTree> {
        Ok(StableTree::with_limits(self.map(sign)?.clone(), tol, kmax))
    }

    pub fn rank(&self) -> usize {
        self.forward.rank()
    }
}

/// Pointwise multiple of a length function.
pub struct Scaled<'a> {
    pub tree: &'a dyn LengthOracle,
    pub factor: f64,
}

impl LengthOracle for Scaled<'_> {
    fn rank(&self) -> usize {
        self.tree.rank()
    }

    fn length(&self, alpha: &ConjClass) -> Result<PairingEstimate> {
        let e = self.tree.length(alpha)?;
        Ok(PairingEstimate { value: e.value * self.factor, error_estimate: e.error_estimate * self.factor, ..e })
    }
}

/// A point `T·g`.
#[derive(Clone, Copy)]
pub struct TreePoint<'a> {
    pub tree: &'a dyn LengthOracle,
    pub g: &'a FreeGroupAut,
}

impl<'a> TreePoint<'a> {
    pub fn new(tree: &'a dyn LengthOracle, g: &'a FreeGroupAut) -> Self {
        TreePoint { tree, g }
    }

    /// `⟨T·g, α⟩ = ⟨T, g(α)⟩`, unnormalized.
    pub fn length(&self, alpha: &ConjClass) -> Result<PairingEstimate> {
        self.tree.length(&self.g.apply_class(alpha))
    }
}

/// Finite set of nontrivial classes on which length functions are sampled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestSet {
    classes: Vec<ConjClass>,
}

pub const DEFAULT_PRIMITIVE_EXTRAS: usize = 20;

impl TestSet {
    /// All classes of length at most 2, then the lexicographically first
    /// `primitive_extras` primitive classes of length 3, then `extras`, with
    /// `exclude` removed.
    pub fn standard(
        basis: &Basis,
        primitive_extras: usize,
        extras: &[ConjClass],
        exclude: &[ConjClass],
    ) -> Result<Self> {
        let mut classes = classes_up_to(basis, 2);
        let mut added = 0;
        for c in classes_of_length(basis, 3) {
            if added == primitive_extras {
                break;
            }
            if is_primitive(&c, basis)? {
                classes.push(c);
                added += 1;
            }
        }
        for e in extras {
            if e.is_trivial() {
                return Err(Error::input("test set extras must be nontrivial"));
            }
            if !classes.contains(e) {
                classes.push(e.clone().checked_for(basis)?);
            }
        }
        classes.retain(|c| !exclude.contains(c) && !exclude.contains(&c.inverse()));
        Ok(TestSet { classes })
    }

    pub fn default_for(basis: &Basis) -> Result<Self> {
        Self::standard(basis, DEFAULT_PRIMITIVE_EXTRAS, &[], &[])
    }

    pub fn from_classes(classes: Vec<ConjClass>) -> Result<Self> {
        let mut seen = classes.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != classes.len() {
            return Err(Error::input("duplicate classes in test set"));
        }
        if classes.iter().any(|c| c.is_trivial()) || classes.is_empty() {
            return Err(Error::input("test set classes must be nontrivial"));
        }
        Ok(TestSet { classes })
    }

    pub fn classes(&self) -> &[ConjClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// A projectivized length function restricted to a test set.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthFunctionApprox {
    /// Values in test-set order, summing to 1.
    pub values: Vec<f64>,
    /// Sum of the raw values before normalization.
    pub scale: f64,
    pub k_used: usize,
    /// Largest last-step delta over the test set, after normalization.
    pub error_estimate: f64,
}

impl LengthFunctionApprox {
    pub fn from_raw(raw: &[PairingEstimate]) -> Result<Self> {
        let scale: f64 = raw.iter().map(|e| e.value).sum();
        if !(scale > 0.0) {
            return Err(Error::degenerate("degenerate test set for this tree"));
        }
        Ok(LengthFunctionApprox {
            values: raw.iter().map(|e| e.value / scale).collect(),
            scale,
            k_used: raw.iter().map(|e| e.k_used).max().unwrap_or(0),
            error_estimate: raw.iter().map(|e| e.error_estimate).fold(0.0, f64::max) / scale,
        })
    }

    /// Sup-norm distance.
    pub fn distance(&self, other: &LengthFunctionApprox) -> f64 {
        sup_distance(&self.values, &other.values)
    }
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// The normalized length vector of `T·g` on `testset`.
pub fn length_function(point: TreePoint<'_>, testset: &TestSet) -> Result<LengthFunctionApprox> {
    let raw: Vec<PairingEstimate> =
        testset.classes().iter().map(|c| point.length(c)).collect::<Result<_>>()?;
    LengthFunctionApprox::from_raw(&raw)
}

/// `⟨T, γ⟩` on the projective scale of `t`: the same limit as the test-set
/// values, divided by the normalization of `t`.
pub fn pairing(point: TreePoint<'_>, t: &LengthFunctionApprox, gamma: &ConjClass) -> Result<f64> {
    if gamma.is_trivial() {
        return Err(Error::input("pairing with the trivial class"));
    }
    Ok(point.length(gamma)?.value / t.scale)
}
