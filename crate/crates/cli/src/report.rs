//! Report envelope and the JSON, CSV and DOT emitters.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

pub const SCHEMA: u32 = 1;

/// Environment variable redirecting relative output paths.
pub const OUT_DIR_VAR: &str = "OUTHYP_OUT_DIR";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub args: Value,
    pub config: Value,
    pub results: Value,
    /// Radii, budgets and iteration depths behind the numbers in `results`.
    pub truncation: Value,
    pub assertions: Vec<Assertion>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str, args: Value, config: Value) -> Self {
        Report {
            schema: SCHEMA,
            command: command.to_owned(),
            args,
            config,
            results: Value::Null,
            truncation: Value::Null,
            assertions: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion { name: name.to_owned(), passed, detail: detail.into() });
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// `path` under the output-directory override when it is relative.
pub fn out_path(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            let p = out_path(p);
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::error::CliError::input(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Undirected graph in DOT, vertices labelled by their triples.
pub fn dot(name: &str, labels: &[String], edges: impl Iterator<Item = (usize, usize)>) -> String {
    let mut s = format!("graph {name} {{\n  node [shape=box];\n");
    for (i, l) in labels.iter().enumerate() {
        s.push_str(&format!("  n{i} [label=\"{l}\"];\n"));
    }
    for (u, v) in edges {
        s.push_str(&format!("  n{u} -- n{v};\n"));
    }
    s.push_str("}\n");
    s
}
