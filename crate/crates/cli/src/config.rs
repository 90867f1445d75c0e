//! Run configuration: one TOML file with named automorphisms, the test set,
//! the Out-instance parameters and per-experiment settings.

use std::collections::BTreeMap;
use std::path::Path;

use outhyp_core::bowditch::OutParams;
use outhyp_core::class::ConjClass;
use outhyp_core::limits::{MapPair, TestSet, DEFAULT_KMAX, DEFAULT_PRIMITIVE_EXTRAS, DEFAULT_TOL};
use outhyp_core::train_track::TrainTrackMap;
use outhyp_core::{nielsen_generators, Basis, FreeGroupAut};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub rank: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub testset: TestSetConfig,
    #[serde(default)]
    pub aut: BTreeMap<String, AutConfig>,
    #[serde(default)]
    pub instance: InstanceConfig,
    #[serde(default)]
    pub experiment: ExperimentConfig,
}

fn default_seed() -> u64 {
    1
}

fn default_workers() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AutConfig {
    pub images: Vec<String>,
    #[serde(default)]
    pub inverse_images: Option<Vec<String>>,
    #[serde(default)]
    pub geometric: bool,
    /// Boundary class fixed by a geometric map, kept out of test sets.
    #[serde(default)]
    pub boundary: Option<String>,
    #[serde(default)]
    pub literature: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub eps: f64,
    pub mu: f64,
    pub eps_eq: f64,
    pub tol: f64,
    pub kmax: usize,
    /// Ball radius for annulus translates.
    pub radius: usize,
    /// Ball radius for sample points, when different from `radius`.
    pub sample_radius: Option<usize>,
    /// Graph parameter; connectivity threshold + 1 when absent.
    pub r: Option<u32>,
    /// Depth of the sample points whose triples form the complex.
    pub triple_depth: usize,
    pub quadruple_budget: usize,
    pub five_budget: usize,
    pub path_budget: usize,
    pub delta_budget: usize,
    pub triangle_budget: usize,
}

impl Default for Params {
    fn default() -> Self {
        let out = OutParams::default();
        Params {
            eps: out.eps,
            mu: out.mu,
            eps_eq: out.eps_eq,
            tol: DEFAULT_TOL,
            kmax: DEFAULT_KMAX,
            radius: out.radius,
            sample_radius: None,
            r: None,
            triple_depth: 2,
            quadruple_budget: 200_000,
            five_budget: 20_000,
            path_budget: 2_000,
            delta_budget: 200_000,
            triangle_budget: 200_000,
        }
    }
}

impl Params {
    pub fn out_params(&self) -> OutParams {
        OutParams {
            eps: self.eps,
            mu: self.mu,
            eps_eq: self.eps_eq,
            radius: self.radius,
            sample_radius: self.sample_radius,
            tol: self.tol,
            kmax: self.kmax,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestSetConfig {
    pub primitive_extras: usize,
    pub extras: Vec<String>,
}

impl Default for TestSetConfig {
    fn default() -> Self {
        TestSetConfig { primitive_extras: DEFAULT_PRIMITIVE_EXTRAS, extras: Vec::new() }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstanceConfig {
    /// Maps whose poles and neighborhoods make up the annulus system.
    pub maps: Vec<String>,
    /// Ball generators; the Nielsen generators when empty.
    pub gens: Vec<String>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub t2: T2Config,
    pub a1a2: A1A2Config,
    pub translation: TranslationConfig,
    pub orbit: OrbitConfig,
    pub wpd: WpdConfig,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct T2Config {
    /// Map whose stable tree is the first point.
    pub first: Option<String>,
    /// Element word translating the first point.
    pub first_g: String,
    pub second: Option<String>,
    pub second_g: String,
    pub max_len: usize,
    pub all_classes: bool,
}

impl Default for T2Config {
    fn default() -> Self {
        T2Config {
            first: None,
            first_g: String::new(),
            second: None,
            second_g: String::new(),
            max_len: 8,
            all_classes: false,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct A1A2Config {
    pub radii: Vec<usize>,
    /// Neighborhood radii tried for the largest ε passing A2 with k = 0.
    pub eps_grid: Vec<f64>,
}

impl Default for A1A2Config {
    fn default() -> Self {
        A1A2Config { radii: vec![3, 4], eps_grid: vec![0.02, 0.05, 0.1, 0.15, 0.2] }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct TranslationConfig {
    pub map: Option<String>,
    pub nmax: usize,
    pub min_slope: f64,
}

impl Default for TranslationConfig {
    fn default() -> Self {
        TranslationConfig { map: None, nmax: 8, min_slope: 0.1 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitConfig {
    /// Generators of a subgroup fixing `gamma`.
    pub gens: Vec<String>,
    pub gamma: String,
    /// Petals of the rose collapsed in the marker tree.
    pub collapsed: Vec<usize>,
    pub radius: usize,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig { gens: Vec::new(), gamma: "a".into(), collapsed: vec![0], radius: 2 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct WpdConfig {
    pub map: Option<String>,
    pub c: u32,
    pub ns: Vec<usize>,
    pub ball_radius: usize,
}

impl Default for WpdConfig {
    fn default() -> Self {
        WpdConfig { map: None, c: 1, ns: vec![1, 2, 4, 8], ball_radius: 2 }
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let before = &source[..offset.min(source.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, col)
}

/// A parsed config with its source text, for error positions.
pub struct Loaded {
    pub config: Config,
    pub source: String,
    pub origin: String,
}

impl Loaded {
    pub fn from_file(path: &Path) -> Result<Loaded> {
        let source = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        Loaded::from_str(&source, &path.display().to_string())
    }

    pub fn from_str(source: &str, origin: &str) -> Result<Loaded> {
        let config: Config = toml::from_str(source).map_err(|e| {
            let (line, col) = e.span().map_or((1, 1), |s| line_col(source, s.start));
            CliError::input(format!("{origin}:{line}:{col}: {}", e.message()))
        })?;
        Ok(Loaded { config, source: source.to_owned(), origin: origin.to_owned() })
    }

    /// A config echoed into a report, without positions.
    pub fn from_echo(value: &serde_json::Value) -> Result<Loaded> {
        let config: Config = serde_json::from_value(value.clone())
            .map_err(|e| CliError::input(format!("config echo: {e}")))?;
        Ok(Loaded { config, source: String::new(), origin: "config echo".into() })
    }

    /// Prefixes `msg` with the position of the first quoted `needle`.
    fn at(&self, needle: &str, inner: usize, msg: impl std::fmt::Display) -> CliError {
        let quoted = format!("\"{needle}\"");
        match self.source.find(&quoted) {
            Some(p) => {
                let (line, col) = line_col(&self.source, p + 1 + inner);
                CliError::input(format!("{}:{line}:{col}: {msg}", self.origin))
            }
            None => CliError::input(format!("{}: {msg}", self.origin)),
        }
    }

    fn word_error(&self, s: &str, e: outhyp_core::Error) -> CliError {
        let inner = invalid_position(s, self.config.rank).unwrap_or(0);
        self.at(s, inner, e)
    }

    /// Resolves names, parses every word and certifies inverse images.
    pub fn resolve(&self) -> Result<World> {
        let c = &self.config;
        let basis = Basis::new(c.rank).map_err(|e| CliError::input(format!("{}: {e}", self.origin)))?;
        if c.workers == 0 {
            return Err(CliError::input(format!("{}: workers must be at least 1", self.origin)));
        }
        let mut auts = BTreeMap::new();
        for (name, a) in &c.aut {
            if name.is_empty() || !name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_') {
                return Err(CliError::input(format!(
                    "{}: automorphism name \"{name}\" must be alphanumeric",
                    self.origin
                )));
            }
            let parse_all = |ws: &[String]| -> Result<Vec<outhyp_core::Word>> {
                ws.iter().map(|s| basis.parse(s).map_err(|e| self.word_error(s, e))).collect()
            };
            if a.images.len() != c.rank {
                return Err(self.at(
                    a.images.first().map_or("", String::as_str),
                    0,
                    format!("aut.{name}: expected {} images, got {}", c.rank, a.images.len()),
                ));
            }
            let images = parse_all(&a.images)?;
            let inverse = a.inverse_images.as_deref().map(parse_all).transpose()?;
            let f = FreeGroupAut::new(images, inverse)
                .map_err(|e| CliError::input(format!("{}: aut.{name}: {e}", self.origin)))?;
            auts.insert(name.clone(), f);
        }
        let mut exclude = Vec::new();
        for a in c.aut.values().filter(|a| a.geometric) {
            if let Some(b) = &a.boundary {
                exclude.push(ConjClass::parse_nontrivial(&basis, b).map_err(|e| self.word_error(b, e))?);
            }
        }
        let extras = c
            .testset
            .extras
            .iter()
            .map(|s| ConjClass::parse_nontrivial(&basis, s).map_err(|e| self.word_error(s, e)))
            .collect::<Result<Vec<_>>>()?;
        let testset = TestSet::standard(&basis, c.testset.primitive_extras, &extras, &exclude)?;
        let world = World { basis, auts, testset, exclude };
        for name in c.instance.maps.iter().chain(&c.instance.gens).chain(&c.experiment.orbit.gens) {
            world.aut(name)?;
        }
        for name in [
            &c.experiment.t2.first,
            &c.experiment.t2.second,
            &c.experiment.translation.map,
            &c.experiment.wpd.map,
        ]
        .into_iter()
        .flatten()
        {
            world.aut(name)?;
        }
        world.element(&c.experiment.t2.first_g)?;
        world.element(&c.experiment.t2.second_g)?;
        Ok(world)
    }
}

/// Position (0-based, in chars) of the first symbol outside the basis.
fn invalid_position(s: &str, rank: usize) -> Option<usize> {
    s.chars().position(|ch| {
        !(ch.is_ascii_alphabetic() && (ch.to_ascii_lowercase() as usize - 'a' as usize) < rank)
    })
}

/// Everything a command needs, resolved from a config.
pub struct World {
    pub basis: Basis,
    pub auts: BTreeMap<String, FreeGroupAut>,
    pub testset: TestSet,
    pub exclude: Vec<ConjClass>,
}

impl World {
    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn aut(&self, name: &str) -> Result<&FreeGroupAut> {
        self.auts
            .get(name)
            .ok_or_else(|| CliError::input(format!("undefined automorphism \"{name}\"")))
    }

    /// Parses `NAME`, `NAME^k` factors separated by `.` or spaces into
    /// their composition, the rightmost factor applied first. The empty
    /// word and `1` give the identity.
    pub fn element(&self, expr: &str) -> Result<FreeGroupAut> {
        let mut acc = FreeGroupAut::identity(self.rank());
        for tok in expr.split(|c: char| c == '.' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            if tok == "1" {
                continue;
            }
            let (name, k) = match tok.split_once('^') {
                Some((n, k)) => {
                    let k: i64 = k
                        .parse()
                        .map_err(|_| CliError::input(format!("bad exponent in \"{tok}\" of \"{expr}\"")))?;
                    (n, k)
                }
                None => (tok, 1),
            };
            let f = self.aut(name)?.pow(k)?;
            acc = acc.compose(&f);
        }
        Ok(acc)
    }

    /// Train track representatives of a named map and its inverse.
    pub fn map_pair(&self, name: &str, tol: f64) -> Result<MapPair> {
        let f = self.aut(name)?;
        let forward = TrainTrackMap::with_tolerance(f.clone(), tol)
            .map_err(|e| CliError::from(e).context(&format!("map {name}")))?;
        let backward = match f.inverse() {
            Some(g) => Some(
                TrainTrackMap::with_tolerance(g, tol)
                    .map_err(|e| CliError::from(e).context(&format!("inverse of map {name}")))?,
            ),
            None => None,
        };
        Ok(MapPair::new(forward, backward)?)
    }

    pub fn ball_gens(&self, config: &Config) -> Result<Vec<FreeGroupAut>> {
        if config.instance.gens.is_empty() {
            return Ok(nielsen_generators(self.rank())?);
        }
        config.instance.gens.iter().map(|n| self.aut(n).cloned()).collect()
    }

    /// Maps of the Out instance; the first configured automorphism when
    /// none is listed.
    pub fn instance_maps(&self, config: &Config) -> Result<Vec<MapPair>> {
        let names = self.instance_map_names(config)?;
        names.iter().map(|n| self.map_pair(n, DEFAULT_TOL)).collect()
    }

    pub fn instance_map_names(&self, config: &Config) -> Result<Vec<String>> {
        if !config.instance.maps.is_empty() {
            return Ok(config.instance.maps.clone());
        }
        match self.auts.keys().next() {
            Some(n) => Ok(vec![n.clone()]),
            None => Err(CliError::input("the config defines no automorphisms")),
        }
    }
}

impl CliError {
    pub fn context(self, what: &str) -> CliError {
        match self {
            CliError::Input(m) => CliError::Input(format!("{what}: {m}")),
            CliError::Numeric(m) => CliError::Numeric(format!("{what}: {m}")),
        }
    }
}
