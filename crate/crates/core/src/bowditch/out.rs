//! The annulus system on translates of stable and unstable trees.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::system::{Annulus, AnnulusLabel, AnnulusSystem, Crossratio, Profile};
use crate::aut::{enumerate_ball_with_depth, FreeGroupAut, OuterFingerprint};
use crate::bitset::BitSet;
use crate::class::ConjClass;
use crate::error::{Error, Result};
use crate::limits::{
    LengthFunctionApprox, LengthOracle, MapPair, PairingEstimate, Sign, StableTree, TestSet,
    DEFAULT_KMAX, DEFAULT_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutParams {
    /// Radius of the neighborhoods `D^±` in the sup norm.
    pub eps: f64,
    /// Interior margin: membership means distance `< eps - mu`.
    pub mu: f64,
    /// Vectors this close are the same sample point.
    pub eps_eq: f64,
    /// Ball radius for annulus translates.
    pub radius: usize,
    /// Ball radius for sample points; `None` uses `radius`.
    pub sample_radius: Option<usize>,
    pub tol: f64,
    pub kmax: usize,
}

impl Default for OutParams {
    fn default() -> Self {
        OutParams {
            eps: 0.05,
            mu: 0.005,
            eps_eq: 1e-6,
            radius: 4,
            sample_radius: None,
            tol: DEFAULT_TOL, kmax: DEFAULT_KMAX }
    }
}

/// The tree a point is a translate of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Pole { map: usize, sign: Sign },
    /// An auxiliary tree registered with [`OutInstance::add_marker`].
    Marker(usize),
}

/// The point `T·g`.
#[derive(Clone, Debug)]
pub struct OutPoint {
    pub source: Source,
    pub g: FreeGroupAut,
}

impl OutPoint {
    /// `(T·g)·h = T·(g∘h)`.
    pub fn act(&self, h: &FreeGroupAut) -> OutPoint {
        OutPoint { source: self.source, g: self.g.compose(h) }
    }
}

#[derive(Clone, Debug)]
pub struct SampleEntry {
    pub point: OutPoint,
    /// Word length of the translating element in the ball.
    pub depth: usize,
    pub vector: LengthFunctionApprox,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub in_minus: bool,
    pub in_plus: bool,
    pub dist_minus: f64,
    pub dist_plus: f64,
}

impl Membership {
    pub fn in_gap(&self) -> bool {
        !self.in_minus && !self.in_plus
    }
}

pub struct OutInstance {
    params: OutParams,
    testset: TestSet,
    poles: Vec<[StableTree; 2]>,
    markers: Vec<Box<dyn LengthOracle>>,
    base: Vec<[LengthFunctionApprox; 2]>,
    ball: Vec<(FreeGroupAut, usize)>,
    ball_inverses: Vec<FreeGroupAut>,
    sample: Vec<SampleEntry>,
    engine: Crossratio,
    located: Vec<(LengthFunctionApprox, usize)>,
    lengths: BTreeMap<(Source, ConjClass), PairingEstimate>,
    vectors: BTreeMap<(Source, OuterFingerprint), LengthFunctionApprox>,
}

fn slot(sign: Sign) -> usize {
    match sign {
        Sign::Plus => 0,
        Sign::Minus => 1,
    }
}

struct Caches<'a> {
    testset: &'a TestSet,
    poles: &'a [[StableTree; 2]],
    markers: &'a [Box<dyn LengthOracle>],
    lengths: &'a mut BTreeMap<(Source, ConjClass), PairingEstimate>,
    vectors: &'a mut BTreeMap<(Source, OuterFingerprint), LengthFunctionApprox>,
}

impl Caches<'_> {
    fn vector(&mut self, source: Source, h: &FreeGroupAut) -> Result<LengthFunctionApprox> {
        let key = (source, h.fingerprint());
        if let Some(v) = self.vectors.get(&key) {
            return Ok(v.clone());
        }
        let tree: &dyn LengthOracle = match source {
            Source::Pole { map, sign } => &self.poles[map][slot(sign)],
            Source::Marker(i) => self.markers[i].as_ref(),
        };
        let mut raw = Vec::with_capacity(self.testset.len());
        for c in self.testset.classes() {
            let img = h.apply_class(c);
            let k = (source, img);
            let e = match self.lengths.get(&k) {
                Some(e) => *e,
                None => {
                    let e = tree.length(&k.1)?;
                    self.lengths.insert(k, e);
                    e
                }
            };
            raw.push(e);
        }
        let v = LengthFunctionApprox::from_raw(&raw)?;
        self.vectors.insert(key, v.clone());
        Ok(v)
    }
}

impl OutInstance {
    /// Samples `T_i^±·g` and builds the annuli `A_i·g = (D_i^-·g, D_i^+·g)`
    /// and their negatives for `g` in the ball of `gens`.
    pub fn build(
        maps: &[MapPair],
        gens: &[FreeGroupAut],
        testset: TestSet,
        params: OutParams,
    ) -> Result<Self> {
        if !(params.eps > params.mu && params.mu > 0.0) {
            return Err(Error::input("need eps > mu > 0"));
        }
        if !(params.eps_eq >= 0.0 && params.eps_eq < params.eps - params.mu) {
            return Err(Error::input("need 0 <= eps_eq < eps - mu"));
        }
        let Some(first) = maps.first() else {
            return Err(Error::input("the instance needs at least one map"));
        };
        let rank = first.rank();
        if maps.iter().any(|m| m.rank() != rank) || gens.iter().any(|g| g.rank() != rank) {
            return Err(Error::input("maps and generators must share a rank"));
        }
        let mut poles = Vec::with_capacity(maps.len());
        for m in maps {
            poles.push([
                m.tree(Sign::Plus, params.tol, params.kmax)?,
                m.tree(Sign::Minus, params.tol, params.kmax)?,
            ]);
        }
        let sample_radius = params.sample_radius.unwrap_or(params.radius);
        let ball = enumerate_ball_with_depth(gens, params.radius.max(sample_radius))?;
        let ball_inverses = ball
            .iter()
            .map(|(g, _)| g.inverse().ok_or_else(|| Error::input("ball element without inverse")))
            .collect::<Result<Vec<_>>>()?;
        let mut lengths = BTreeMap::new();
        let mut vectors = BTreeMap::new();
        let markers: Vec<Box<dyn LengthOracle>> = Vec::new();
        let mut caches = Caches {
            testset: &testset,
            poles: &poles,
            markers: &markers,
            lengths: &mut lengths,
            vectors: &mut vectors,
        };
        let id = FreeGroupAut::identity(rank);
        let mut base = Vec::with_capacity(maps.len());
        for i in 0..maps.len() {
            base.push([
                caches.vector(Source::Pole { map: i, sign: Sign::Plus }, &id)?,
                caches.vector(Source::Pole { map: i, sign: Sign::Minus }, &id)?,
            ]);
        }
        let mut sample: Vec<SampleEntry> = Vec::new();
        for (g, depth) in ball.iter().filter(|(_, d)| *d <= sample_radius) {
            for i in 0..maps.len() {
                for sign in [Sign::Plus, Sign::Minus] {
                    let source = Source::Pole { map: i, sign };
                    let vector = caches.vector(source, g)?;
                    if sample.iter().any(|s| s.vector.distance(&vector) <= params.eps_eq) {
                        continue;
                    }
                    sample.push(SampleEntry {
                        point: OutPoint { source, g: g.clone() },
                        depth: *depth,
                        vector,
                    });
                }
            }
        }
        let n = sample.len();
        let inner = params.eps - params.mu;
        let mut candidates = Vec::with_capacity(2 * ball.len() * maps.len());
        for (t, ginv) in ball_inverses.iter().enumerate() {
            if ball[t].1 > params.radius {
                continue;
            }
            for (i, b) in base.iter().enumerate() {
                let mut minus = BitSet::new(n);
                let mut plus = BitSet::new(n);
                for (q, s) in sample.iter().enumerate() {
                    let v = caches.vector(s.point.source, &s.point.g.compose(ginv))?;
                    if v.distance(&b[slot(Sign::Minus)]) < inner {
                        minus.insert(q);
                    }
                    if v.distance(&b[slot(Sign::Plus)]) < inner {
                        plus.insert(q);
                    }
                }
                candidates.push(Annulus {
                    minus: minus.clone(),
                    plus: plus.clone(),
                    label: AnnulusLabel { base: i, negated: false, translate: t },
                });
                candidates.push(Annulus {
                    minus: plus,
                    plus: minus,
                    label: AnnulusLabel { base: i, negated: true, translate: t },
                });
            }
        }
        let system = AnnulusSystem::new(n, candidates)?;
        let engine = Crossratio::new(system);
        let located = sample.iter().enumerate().map(|(i, s)| (s.vector.clone(), i)).collect();
        Ok(OutInstance {
            params,
            testset,
            poles,
            markers,
            base,
            ball,
            ball_inverses,
            sample,
            engine,
            located,
            lengths,
            vectors,
        })
    }

    pub fn params(&self) -> &OutParams {
        &self.params
    }

    pub fn testset(&self) -> &TestSet {
        &self.testset
    }

    pub fn ball(&self) -> &[(FreeGroupAut, usize)] {
        &self.ball
    }

    pub fn sample(&self) -> &[SampleEntry] {
        &self.sample
    }

    pub fn system(&self) -> &AnnulusSystem {
        self.engine.system()
    }

    pub fn engine(&mut self) -> &mut Crossratio {
        &mut self.engine
    }

    pub fn base_vector(&self, map: usize, sign: Sign) -> &LengthFunctionApprox {
        &self.base[map][slot(sign)]
    }

    /// Sup-norm distance between `T_i^+` and `T_i^-`.
    pub fn separation(&self, map: usize) -> f64 {
        self.base[map][0].distance(&self.base[map][1])
    }

    /// Registers an auxiliary tree; its points are located with
    /// [`Source::Marker`].
    pub fn add_marker(&mut self, tree: Box<dyn LengthOracle>) -> Result<Source> {
        if tree.rank() != self.ball[0].0.rank() {
            return Err(Error::input("marker tree has the wrong rank"));
        }
        self.markers.push(tree);
        Ok(Source::Marker(self.markers.len() - 1))
    }

    fn caches(&mut self) -> Caches<'_> {
        Caches {
            testset: &self.testset,
            poles: &self.poles,
            markers: &self.markers,
            lengths: &mut self.lengths,
            vectors: &mut self.vectors,
        }
    }

    /// Normalized test-set vector of `T·h`.
    pub fn vector(&mut self, source: Source, h: &FreeGroupAut) -> Result<LengthFunctionApprox> {
        self.caches().vector(source, h)
    }

    /// Membership of `p` in the interiors of the sides of annulus `a`.
    pub fn membership(&mut self, p: &OutPoint, a: usize) -> Result<Membership> {
        let label = self.engine.system().annuli()[a].label;
        let ginv = self.ball_inverses[label.translate].clone();
        self.membership_at(p, label.base, label.negated, &ginv)
    }

    /// Membership of `p` in `±A_i·g`: `p ∈ D·g` iff `p·g^{-1} ∈ D`.
    pub fn membership_in(
        &mut self,
        p: &OutPoint,
        base: usize,
        negated: bool,
        g: &FreeGroupAut,
    ) -> Result<Membership> {
        if base >= self.base.len() {
            return Err(Error::input(alloc::format!("no base annulus {base}")));
        }
        let ginv = g.inverse().ok_or_else(|| Error::input("translate without inverse_images"))?;
        self.membership_at(p, base, negated, &ginv)
    }

    fn membership_at(
        &mut self,
        p: &OutPoint,
        base: usize,
        negated: bool,
        ginv: &FreeGroupAut,
    ) -> Result<Membership> {
        let (minus_sign, plus_sign) =
            if negated { (Sign::Plus, Sign::Minus) } else { (Sign::Minus, Sign::Plus) };
        let v = self.vector(p.source, &p.g.compose(ginv))?;
        let dist_minus = v.distance(&self.base[base][slot(minus_sign)]);
        let dist_plus = v.distance(&self.base[base][slot(plus_sign)]);
        let inner = self.params.eps - self.params.mu;
        Ok(Membership { in_minus: dist_minus < inner, in_plus: dist_plus < inner, dist_minus, dist_plus })
    }

    pub fn profile(&mut self, p: &OutPoint) -> Result<Profile> {
        let m = self.engine.system().len();
        let mut minus = BitSet::new(m);
        let mut plus = BitSet::new(m);
        for a in 0..m {
            let mem = self.membership(p, a)?;
            if mem.in_minus {
                minus.insert(a);
            }
            if mem.in_plus {
                plus.insert(a);
            }
        }
        Ok(Profile { minus, plus })
    }

    /// Id of `p` in the crossratio engine: the sample point with the same
    /// vector if there is one, otherwise a new point with its own profile.
    pub fn locate(&mut self, p: &OutPoint) -> Result<usize> {
        let v = self.vector(p.source, &p.g)?;
        if let Some((_, id)) = self.located.iter().find(|(w, _)| w.distance(&v) <= self.params.eps_eq) {
            return Ok(*id);
        }
        let profile = self.profile(p)?;
        let id = self.engine.add_point(profile)?;
        self.located.push((v, id));
        Ok(id)
    }

    /// True when `id` is one of the sample points.
    pub fn in_sample(&self, id: usize) -> bool {
        id < self.sample.len()
    }

    /// Sample points translated by elements of word length at most `depth`.
    pub fn core_points(&self, depth: usize) -> Vec<usize> {
        (0..self.sample.len()).filter(|&i| self.sample[i].depth <= depth).collect()
    }

    /// Unordered triples of distinct core points.
    pub fn core_triples(&self, depth: usize) -> Vec<[usize; 3]> {
        let pts = self.core_points(depth);
        let mut out = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                for k in j + 1..pts.len() {
                    out.push([pts[i], pts[j], pts[k]]);
                }
            }
        }
        out
    }

    /// Points of sample triples, as points of the group action.
    pub fn point(&self, id: usize) -> Option<&OutPoint> {
        self.sample.get(id).map(|s| &s.point)
    }

    pub fn cached_vectors(&self) -> usize {
        self.vectors.len()
    }
}
