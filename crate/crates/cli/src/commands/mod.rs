pub mod analyze;
pub mod complex;
pub mod experiment;

use std::path::{Path, PathBuf};

use outhyp_core::bowditch::{OutInstance, OutParams, OutTriple, Source};
use outhyp_core::limits::Sign;
use outhyp_core::FreeGroupAut;
use serde_json::{json, Value};

use crate::config::{Loaded, World};
use crate::error::{CliError, Result};
use crate::report::Report;

/// A report plus side files (CSV, DOT) to write next to it.
pub struct Output {
    pub report: Report,
    pub files: Vec<(PathBuf, String)>,
}

impl Output {
    pub fn new(report: Report) -> Self {
        Output { report, files: Vec::new() }
    }

    pub fn with_file(mut self, path: Option<&Path>, text: impl FnOnce() -> Result<String>) -> Result<Self> {
        if let Some(p) = path {
            self.files.push((p.to_path_buf(), text()?));
        }
        Ok(self)
    }
}

pub struct Ctx {
    pub loaded: Loaded,
    pub world: World,
    pub pool: rayon::ThreadPool,
}

impl Ctx {
    pub fn load(path: &Path) -> Result<Ctx> {
        Ctx::from_loaded(Loaded::from_file(path)?)
    }

    pub fn from_loaded(loaded: Loaded) -> Result<Ctx> {
        let world = loaded.resolve()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(loaded.config.workers)
            .build()
            .map_err(|e| CliError::input(format!("worker pool: {e}")))?;
        Ok(Ctx { loaded, world, pool })
    }

    pub fn config_echo(&self) -> Value {
        serde_json::to_value(&self.loaded.config).expect("config serializes")
    }

    pub fn report(&self, command: &str, args: Value) -> Report {
        Report::new(command, args, self.config_echo())
    }

    pub fn instance(&self, params: OutParams) -> Result<OutInstance> {
        let maps = self.world.instance_maps(&self.loaded.config)?;
        let gens = self.world.ball_gens(&self.loaded.config)?;
        Ok(OutInstance::build(&maps, &gens, self.world.testset.clone(), params)?)
    }

    pub fn map_names(&self) -> Result<Vec<String>> {
        self.world.instance_map_names(&self.loaded.config)
    }

    /// The map the orbit experiments translate by.
    pub fn dynamics(&self, name: &Option<String>) -> Result<(String, FreeGroupAut)> {
        let name = match name {
            Some(n) => n.clone(),
            None => self.world.instance_map_names(&self.loaded.config)?.remove(0),
        };
        let f = self.world.aut(&name)?.clone();
        Ok((name, f))
    }
}

pub fn sign_str(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

pub fn images(g: &FreeGroupAut) -> Vec<String> {
    g.images().iter().map(|w| w.to_string()).collect()
}

/// The first three sample points at depth one.
pub fn canonical_triple(inst: &OutInstance) -> Result<OutTriple> {
    let pts: Vec<_> = inst.sample().iter().filter(|e| e.depth == 1).take(3).map(|e| e.point.clone()).collect();
    match <[_; 3]>::try_from(pts) {
        Ok(x) => Ok(x),
        Err(v) => Err(CliError::input(format!(
            "the sample has {} points at depth one; three are needed",
            v.len()
        ))),
    }
}

pub fn triple_json(x: &OutTriple, names: &[String]) -> Value {
    Value::Array(x.iter().map(|p| json!({ "source": source_label(p.source, names), "g": images(&p.g) })).collect())
}

/// `fib+` for the stable tree of the map named `fib`.
pub fn source_label(s: Source, names: &[String]) -> String {
    match s {
        Source::Pole { map, sign } => format!("{}{}", names[map], sign_str(sign)),
        Source::Marker(i) => format!("marker{i}"),
    }
}

pub fn instance_truncation(inst: &OutInstance, budget: usize) -> Value {
    let p = inst.params();
    json!({
        "radius": p.radius,
        "sample_radius": p.sample_radius.unwrap_or(p.radius),
        "eps": p.eps,
        "mu": p.mu,
        "eps_eq": p.eps_eq,
        "tol": p.tol,
        "kmax": p.kmax,
        "sample": inst.sample().len(),
        "annuli": inst.system().len(),
        "budget": budget,
    })
}
