//! `complex build` and `complex check`.

use std::path::Path;

use outhyp_core::bowditch::{
    axiom_scan, build_graph, crossratio_axioms, estimate_delta, partitions, subsets, OutInstance, RhoTable,
};
use serde_json::{json, Value};

use super::{images, instance_truncation, source_label, Ctx, Output};
use crate::config::Loaded;
use crate::error::{CliError, Result};
use crate::report::{dot, Report};

/// Everything `complex build` computes, in report form.
struct Built {
    results: Value,
    truncation: Value,
    warnings: Vec<String>,
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
}

fn sample_json(inst: &OutInstance, names: &[String]) -> Value {
    let rows: Vec<Value> = inst
        .sample()
        .iter()
        .enumerate()
        .map(|(id, e)| {
            let source = source_label(e.point.source, names);
            json!({ "id": id, "source": source, "g": images(&e.point.g), "depth": e.depth, "vector": e.vector.values })
        })
        .collect();
    Value::Array(rows)
}

fn compute(ctx: &Ctx) -> Result<Built> {
    let cfg = &ctx.loaded.config;
    let p = &cfg.params;
    let names = ctx.world.instance_map_names(cfg)?;
    let mut inst = ctx.instance(p.out_params())?;
    let mut warnings = Vec::new();
    let n = inst.sample().len();
    let points: Vec<usize> = (0..n).collect();
    let (quads, exhaustive) = subsets(&points, 4, p.quadruple_budget, cfg.seed);
    if !exhaustive {
        warnings.push(format!("crossratio table sampled: {} of the quadruples", quads.len()));
    }
    let mut table = Vec::new();
    for q in &quads {
        let v = partitions(inst.engine(), q);
        let pairings = [[q[0], q[1], q[2], q[3]], [q[0], q[2], q[1], q[3]], [q[0], q[3], q[1], q[2]]];
        for (pr, &val) in pairings.iter().zip(&v) {
            if val > 0 {
                table.push(json!([pr[0], pr[1], pr[2], pr[3], val]));
            }
        }
    }
    let triples = inst.core_triples(p.triple_depth);
    if triples.len() < 2 {
        return Err(CliError::input(format!(
            "only {} triples at depth {}; raise params.triple_depth",
            triples.len(),
            p.triple_depth
        )));
    }
    let rho = RhoTable::new(inst.engine(), triples.clone())?;
    let threshold = rho.connectivity_threshold();
    let r = p.r.unwrap_or(threshold + 1);
    let graph = build_graph(&rho, r);
    let mut rho_sparse = Vec::new();
    for i in 0..rho.len() {
        for j in i + 1..rho.len() {
            let v = rho.get(i, j);
            if v > 0 {
                rho_sparse.push(json!([i, j, v]));
            }
        }
    }
    let (_, components) = graph.components();
    let delta = match estimate_delta(&graph, p.delta_budget, cfg.seed) {
        Ok(d) => json!({
            "delta": d.delta, "quadruples": d.quadruples, "exhaustive": d.exhaustive, "diameter": d.diameter,
        }),
        Err(e) => {
            warnings.push(e.to_string());
            Value::Null
        }
    };
    let sys = inst.system();
    let results = json!({
        "maps": names,
        "sample": sample_json(&inst, &names),
        "annuli": sys.len(),
        "duplicate_annuli": sys.duplicates(),
        "covering_annuli": sys.covering(),
        "relation_size": sys.relation_size(),
        "table": table,
        "triples": triples,
        "rho": rho_sparse,
        "threshold": threshold,
        "r": r,
        "graph": { "vertices": graph.num_vertices(), "edges": graph.num_edges(), "components": components },
        "delta": delta,
    });
    let mut truncation = instance_truncation(&inst, p.quadruple_budget);
    truncation["table_exhaustive"] = json!(exhaustive);
    truncation["triple_depth"] = json!(p.triple_depth);
    truncation["delta_budget"] = json!(p.delta_budget);
    truncation["seed"] = json!(cfg.seed);
    let labels = triples.iter().map(|t| format!("{} {} {}", t[0], t[1], t[2])).collect();
    Ok(Built { results, truncation, warnings, labels, edges: graph.edges().collect() })
}

pub fn build(ctx: &Ctx, dot_path: Option<&Path>) -> Result<Output> {
    let built = compute(ctx)?;
    let mut report = ctx.report("complex build", json!({ "dot": dot_path.map(|p| p.display().to_string()) }));
    let connected = built.results["graph"]["components"] == json!(1);
    report.check("graph connected", connected, format!("r = {}", built.results["r"]));
    report.results = built.results;
    report.truncation = built.truncation;
    report.warnings = built.warnings;
    let (labels, edges) = (built.labels, built.edges);
    Output::new(report).with_file(dot_path, || Ok(dot("G_r", &labels, edges.into_iter())))
}

/// Dense ρ table from the sparse entries of a build report.
fn rho_from_report(results: &Value) -> Result<RhoTable> {
    let bad = || CliError::input("malformed triples or rho entries");
    let triples: Vec<[usize; 3]> = serde_json::from_value(results["triples"].clone()).map_err(|_| bad())?;
    let sparse: Vec<(usize, usize, u32)> = serde_json::from_value(results["rho"].clone()).map_err(|_| bad())?;
    let t = triples.len();
    let mut values = vec![0u32; t * t];
    for (i, j, v) in sparse {
        if i >= t || j >= t {
            return Err(bad());
        }
        values[i * t + j] = v;
        values[j * t + i] = v;
    }
    Ok(RhoTable::from_values(triples, values)?)
}

pub fn check(input: &Path) -> Result<Output> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::input(format!("{}: {e}", input.display())))?;
    let stored: Report = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}:{}:{}: {e}", input.display(), e.line(), e.column())))?;
    if stored.schema != crate::report::SCHEMA || stored.command != "complex build" {
        return Err(CliError::input(format!(
            "{}: expected a schema {} report of complex build",
            input.display(),
            crate::report::SCHEMA
        )));
    }
    let ctx = Ctx::from_loaded(Loaded::from_echo(&stored.config)?)?;
    let mut report = ctx.report("complex check", json!({ "input": input.display().to_string() }));
    report.check("round trip", stored.to_json()? == text, "re-serialized report equals the file");

    let built = compute(&ctx)?;
    for key in ["sample", "table", "triples", "rho", "r", "threshold", "delta"] {
        report.check(&format!("recomputed {key}"), built.results[key] == stored.results[key], "bit-exact");
    }

    let p = &ctx.loaded.config.params;
    let seed = ctx.loaded.config.seed;
    let rho = rho_from_report(&stored.results)?;
    let threshold = rho.connectivity_threshold();
    report.check("stored threshold", json!(threshold) == stored.results["threshold"], format!("{threshold}"));
    let mut inst = ctx.instance(p.out_params())?;
    let pts: Vec<usize> = (0..inst.sample().len()).collect();
    let scan = axiom_scan(inst.engine(), &pts, p.quadruple_budget, seed);
    let ax = crossratio_axioms(inst.engine(), &pts, p.quadruple_budget, p.five_budget, p.path_budget, seed);
    let qm = rho.quasi_metric_check(ax.k(), p.triangle_budget, seed);
    report.results = json!({
        "a1_max": scan.a1_max,
        "a2_k": scan.a2_k,
        "quadruples": scan.quadruples,
        "c1_k": ax.c1_k,
        "c2_k": ax.c2_k,
        "path_checks": ax.path_checks,
        "path_realized": ax.path_realized,
        "quasi_metric": { "k": ax.k(), "checked": qm.checked, "violations": qm.violations, "worst_excess": qm.worst_excess },
        "threshold": threshold,
    });
    report.truncation = json!({
        "quadruple_budget": p.quadruple_budget, "five_budget": p.five_budget, "path_budget": p.path_budget,
        "triangle_budget": p.triangle_budget, "exhaustive": scan.exhaustive && ax.exhaustive, "seed": seed,
    });
    Ok(Output::new(report))
}
