//! `analyze` and `limits`.

use std::collections::BTreeMap;
use std::path::Path;

use outhyp_core::class::ConjClass;
use outhyp_core::limits::{stable_tree_length, LengthFunctionApprox, PairingEstimate, Sign, TestSet};
use outhyp_core::train_track::{
    bounded_cancellation, cancellation_bound, check_train_track, critical_constant, growth_rate,
    transition_matrix,
};
use outhyp_core::word::Letter;
use rayon::prelude::*;
use serde_json::json;

use super::{images, sign_str, Ctx, Output};
use crate::error::{CliError, Result};

pub fn analyze(ctx: &Ctx, name: &str) -> Result<Output> {
    let f = ctx.world.aut(name)?;
    let tol = ctx.loaded.config.params.tol;
    let mut report = ctx.report("analyze", json!({ "map": name, "tol": tol }));
    let raw: Vec<Vec<Letter>> = f.images().iter().map(|w| w.letters().to_vec()).collect();
    let check = check_train_track(f.rank(), &raw)?;
    let matrix = transition_matrix(f);
    let metric = growth_rate(&matrix, tol).map_err(|e| CliError::from(e).context(&format!("map {name}")))?;
    let k0 = cancellation_bound(f);
    let kbcc = bounded_cancellation(k0, metric.max_edge_length(), metric.lambda)?;
    let critical = critical_constant(kbcc, metric.lambda)?;
    let turns: Vec<String> = check
        .legal
        .illegal_turns()
        .iter()
        .map(|(x, y)| format!("{x}{y}"))
        .collect();
    let offense = check.offense.as_ref().map(|o| {
        json!({
            "edge": Letter::new(o.edge, false).to_string(),
            "position": o.position,
            "turn": format!("{}{}", o.turn.0, o.turn.1),
            "iterate": o.iterate,
        })
    });
    let inverse_certified = f.inverse().is_some_and(|g| f.compose(&g).is_inner().is_some());
    let decl = &ctx.loaded.config.aut[name];
    report.results = json!({
        "images": images(f),
        "lambda": metric.lambda,
        "edge_lengths": metric.edge_lengths,
        "frequencies": metric.frequencies,
        "residual": metric.residual,
        "matrix": matrix.rows(),
        "K0": k0,
        "kbcc": kbcc,
        "critical_constant": critical,
        "critical_constant_note": "one valid choice: 2·Kbcc/(λ−1) + 1 in eigen-metric units",
        "illegal_turns": turns,
        "train_track": check.is_train_track(),
        "offense": offense,
        "inverse_certified": inverse_certified,
        "geometric": decl.geometric,
        "literature": decl.literature,
    });
    report.truncation = json!({ "power_iterations": metric.iterations, "tol": metric.tolerance });
    report.check("eigen residual", metric.residual <= metric.tolerance, format!("{:e}", metric.residual));
    if !check.is_train_track() {
        report.warn(format!("{name} is not a train track on the rose"));
    }
    if f.inverse_images().is_some() && !inverse_certified {
        report.check("inverse images", false, "composition with the inverse is not inner");
    }
    Ok(Output::new(report))
}

pub struct LimitsRequest<'a> {
    pub map: &'a str,
    pub sign: Sign,
    pub g: &'a str,
    pub testset: Option<&'a Path>,
    pub tol: Option<f64>,
    pub kmax: Option<usize>,
}

/// Reads one class per line, skipping blank lines and `#` comments.
pub fn read_testset(ctx: &Ctx, path: &Path) -> Result<TestSet> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut classes = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let col = line.find(t).unwrap_or(0) + 1;
        let c = ConjClass::parse_nontrivial(&ctx.world.basis, t)
            .map_err(|e| CliError::input(format!("{}:{}:{col}: {e}", path.display(), i + 1)))?;
        classes.push(c);
    }
    TestSet::from_classes(classes).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn limits(ctx: &Ctx, req: &LimitsRequest<'_>) -> Result<Output> {
    let p = &ctx.loaded.config.params;
    let tol = req.tol.unwrap_or(p.tol);
    let kmax = req.kmax.unwrap_or(p.kmax);
    if !(tol > 0.0) {
        return Err(CliError::input("--tol must be positive"));
    }
    let testset = match req.testset {
        Some(path) => read_testset(ctx, path)?,
        None => ctx.world.testset.clone(),
    };
    let pair = ctx.world.map_pair(req.map, p.tol)?;
    let tt = pair.map(req.sign)?;
    let g = ctx.world.element(req.g)?;
    let mut report = ctx.report(
        "limits",
        json!({
            "map": req.map, "sign": sign_str(req.sign), "g": req.g,
            "testset": req.testset.map(|t| t.display().to_string()), "tol": tol, "kmax": kmax,
        }),
    );
    let raw: Vec<PairingEstimate> = ctx.pool.install(|| {
        testset
            .classes()
            .par_iter()
            .map(|c| stable_tree_length(tt, &g.apply_class(c), tol, kmax))
            .collect::<std::result::Result<Vec<_>, _>>()
    })?;
    let approx = LengthFunctionApprox::from_raw(&raw)?;
    let mut values = BTreeMap::new();
    let mut normalized = BTreeMap::new();
    let mut per_class = BTreeMap::new();
    for ((c, e), v) in testset.classes().iter().zip(&raw).zip(&approx.values) {
        values.insert(c.to_string(), e.value);
        normalized.insert(c.to_string(), *v);
        per_class.insert(c.to_string(), json!({ "k_used": e.k_used, "error_estimate": e.error_estimate }));
    }
    report.results = json!({
        "values": values,
        "normalized": normalized,
        "scale": approx.scale,
        "k_used": approx.k_used,
        "error_estimate": approx.error_estimate,
        "lambda": tt.lambda(),
    });
    let excluded: Vec<String> = ctx.world.exclude.iter().map(|c| c.to_string()).collect();
    report.truncation = json!({
        "tol": tol, "kmax": kmax, "testset": testset.len(), "excluded": excluded, "per_class": per_class,
    });
    Ok(Output::new(report))
}
