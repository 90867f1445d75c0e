//! `experiment` subcommands.

use std::path::Path;

use outhyp_core::aut::enumerate_ball_with_depth;
use outhyp_core::bowditch::{
    axiom_scan, build_graph, crossratio_axioms, estimate_delta, orbit_diameter, rho, translation_length,
    triangle_check, wpd_census, Crossratio, Metric, OutParams, RhoTable, TreeModel,
};
use outhyp_core::class::ConjClass;
use outhyp_core::limits::{t2_experiment, RoseMetric, Sign, TreePoint};
use outhyp_core::Error as CoreError;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{canonical_triple, instance_truncation, triple_json, Ctx, Output};
use crate::error::{CliError, Result};
use crate::report::{Report, Table};

fn finish(report: Report, csv: Option<&Path>, table: Table) -> Result<Output> {
    Output::new(report).with_file(csv, || table.to_csv())
}

fn csv_arg(csv: Option<&Path>) -> Value {
    json!({ "csv": csv.map(|p| p.display().to_string()) })
}

pub fn t2(ctx: &Ctx, csv: Option<&Path>) -> Result<Output> {
    let cfg = &ctx.loaded.config;
    let t = &cfg.experiment.t2;
    let p = &cfg.params;
    let (first, _) = ctx.dynamics(&t.first)?;
    let (second, _) = ctx.dynamics(&t.second)?;
    let tree1 = ctx.world.map_pair(&first, p.tol)?.tree(Sign::Plus, p.tol, p.kmax)?;
    let tree2 = ctx.world.map_pair(&second, p.tol)?.tree(Sign::Plus, p.tol, p.kmax)?;
    let g1 = ctx.world.element(&t.first_g)?;
    let g2 = ctx.world.element(&t.second_g)?;
    let r = t2_experiment(
        TreePoint::new(&tree1, &g1),
        TreePoint::new(&tree2, &g2),
        &ctx.world.testset,
        t.max_len,
        p.eps_eq,
        t.all_classes,
    )?;
    let mut report = ctx.report("experiment t2", csv_arg(csv));
    let mut table = Table::new(&["class", "length", "first", "second", "ratio"]);
    for row in &r.rows {
        table.push(vec![
            row.class.to_string(),
            row.class.len().to_string(),
            row.first.to_string(),
            row.second.to_string(),
            row.ratio().to_string(),
        ]);
    }
    report.results = json!({
        "first": { "map": first, "g": t.first_g },
        "second": { "map": second, "g": t.second_g },
        "classes": r.rows.len(),
        "delta": r.delta,
        "delta_class": r.delta_class.to_string(),
        "ceiling": r.ceiling,
        "separation": r.separation,
    });
    report.truncation = json!({
        "max_len": r.max_len, "primitive_only": r.primitive_only, "tol": p.tol, "kmax": p.kmax,
        "testset": ctx.world.testset.len(),
    });
    report.check("delta positive", r.delta > 0.0, format!("{}", r.delta));
    report.check("ceiling finite", r.ceiling.is_finite(), format!("{}", r.ceiling));
    finish(report, csv, table)
}

struct ScanRow {
    radius: usize,
    eps: f64,
    sample: usize,
    annuli: usize,
    quadruples: usize,
    exhaustive: bool,
    a1_max: u32,
    a2_k: u32,
    a2_failures: usize,
}

fn scan_at(ctx: &Ctx, params: OutParams) -> Result<ScanRow> {
    let cfg = &ctx.loaded.config;
    let mut inst = ctx.instance(params)?;
    let pts: Vec<usize> = (0..inst.sample().len()).collect();
    let (sample, annuli) = (inst.sample().len(), inst.system().len());
    let s = axiom_scan(inst.engine(), &pts, cfg.params.quadruple_budget, cfg.seed);
    Ok(ScanRow {
        radius: params.radius,
        eps: params.eps,
        sample,
        annuli,
        quadruples: s.quadruples,
        exhaustive: s.exhaustive,
        a1_max: s.a1_max,
        a2_k: s.a2_k,
        a2_failures: s.a2_failures_at_zero,
    })
}

fn scan_json(r: &ScanRow) -> Value {
    json!({
        "radius": r.radius, "eps": r.eps, "sample": r.sample, "annuli": r.annuli, "quadruples": r.quadruples,
        "exhaustive": r.exhaustive, "a1_max": r.a1_max, "a2_k": r.a2_k, "a2_failures_at_zero": r.a2_failures,
    })
}

pub fn a1a2(ctx: &Ctx, csv: Option<&Path>) -> Result<Output> {
    let cfg = &ctx.loaded.config;
    let e = &cfg.experiment.a1a2;
    if e.radii.is_empty() {
        return Err(CliError::input("experiment.a1a2.radii is empty"));
    }
    let base = cfg.params.out_params();
    let rows: Vec<ScanRow> = ctx.pool.install(|| {
        e.radii
            .par_iter()
            .map(|&radius| scan_at(ctx, OutParams { radius, ..base }))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut report = ctx.report("experiment a1a2", csv_arg(csv));
    let top = *e.radii.iter().max().expect("nonempty");
    let grid: Vec<f64> = e.eps_grid.iter().copied().filter(|&x| x > base.mu && base.eps_eq < x - base.mu).collect();
    if grid.len() < e.eps_grid.len() {
        report.warn("eps grid entries not above mu + eps_eq were skipped");
    }
    let sweep: Vec<(f64, std::result::Result<ScanRow, String>)> = ctx.pool.install(|| {
        grid.par_iter()
            .map(|&eps| {
                let r = scan_at(ctx, OutParams { radius: top, eps, ..base });
                (eps, r.map_err(|e| e.to_string()))
            })
            .collect()
    });
    let mut table = Table::new(&["radius", "eps", "sample", "annuli", "quadruples", "a1_max", "a2_k"]);
    for r in rows.iter().chain(sweep.iter().filter_map(|(_, r)| r.as_ref().ok())) {
        table.push(vec![
            r.radius.to_string(),
            r.eps.to_string(),
            r.sample.to_string(),
            r.annuli.to_string(),
            r.quadruples.to_string(),
            r.a1_max.to_string(),
            r.a2_k.to_string(),
        ]);
    }
    let largest_passing = sweep
        .iter()
        .filter(|(_, r)| r.as_ref().is_ok_and(|r| r.a2_k == 0))
        .map(|(eps, _)| *eps)
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let sweep_json: Vec<Value> = sweep
        .iter()
        .map(|(eps, r)| match r {
            Ok(r) => scan_json(r),
            Err(msg) => json!({ "radius": top, "eps": eps, "error": msg }),
        })
        .collect();
    let maxes: Vec<u32> = rows.iter().map(|r| r.a1_max).collect();
    report.results = json!({
        "radii": rows.iter().map(scan_json).collect::<Vec<_>>(),
        "a1_max": maxes,
        "eps_sweep": sweep_json,
        "largest_eps_passing_a2": largest_passing,
    });
    report.truncation = json!({
        "quadruple_budget": cfg.params.quadruple_budget, "seed": cfg.seed,
        "sample_radius": base.sample_radius, "eps": base.eps, "mu": base.mu,
    });
    for r in &rows {
        report.check(
            &format!("A2 k = 0 at radius {}", r.radius),
            r.a2_k == 0,
            format!("k = {} over {} quadruples", r.a2_k, r.quadruples),
        );
    }
    let stable = maxes.windows(2).all(|w| w[0] == w[1]);
    report.check("A1 max stable across radii", stable, format!("{maxes:?}"));
    finish(report, csv, table)
}

/// Least `k` with no quasi-metric violation on the scanned triple-triples.
fn least_quasi_k(table: &RhoTable, budget: usize, seed: u64) -> u32 {
    (0..=table.max()).find(|&k| table.quasi_metric_check(k, budget, seed).violations == 0).unwrap_or(table.max())
}

fn delta_at(ctx: &Ctx, radius: usize) -> Result<Value> {
    let cfg = &ctx.loaded.config;
    let p = &cfg.params;
    let mut inst = ctx.instance(OutParams { radius, ..p.out_params() })?;
    let triples = inst.core_triples(p.triple_depth);
    let table = RhoTable::new(inst.engine(), triples)?;
    let threshold = table.connectivity_threshold();
    let r = p.r.unwrap_or(threshold + 1);
    let g = build_graph(&table, r);
    let d = estimate_delta(&g, p.delta_budget, cfg.seed).map_err(|e| match e {
        CoreError::Degenerate(m) => CliError::Numeric(format!("radius {radius}: {m}")),
        other => other.into(),
    })?;
    Ok(json!({
        "radius": radius, "triples": table.len(), "threshold": threshold, "r": r, "connected": g.is_connected(),
        "delta": d.delta, "quadruples": d.quadruples, "exhaustive": d.exhaustive, "diameter": d.diameter,
    }))
}

fn tree_delta(n: usize, budget: usize, seed: u64) -> Result<f64> {
    let t = TreeModel::caterpillar(n)?;
    let mut cr = Crossratio::new(t.system()?);
    let mut triples = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                triples.push([a, b, c]);
            }
        }
    }
    let table = RhoTable::new(&mut cr, triples)?;
    let g = build_graph(&table, table.connectivity_threshold() + 1);
    Ok(estimate_delta(&g, budget, seed)?.delta)
}

pub fn axioms(ctx: &Ctx, csv: Option<&Path>) -> Result<Output> {
    let cfg = &ctx.loaded.config;
    let p = &cfg.params;
    let seed = cfg.seed;
    let mut inst = ctx.instance(p.out_params())?;
    let pts: Vec<usize> = (0..inst.sample().len()).collect();
    let ax = crossratio_axioms(inst.engine(), &pts, p.quadruple_budget, p.five_budget, p.path_budget, seed);
    let tri = triangle_check(inst.engine(), &pts, p.five_budget, seed);
    let triples = inst.core_triples(p.triple_depth);
    let table = RhoTable::new(inst.engine(), triples)?;
    let k = ax.k();
    let qm = table.quasi_metric_check(k, p.triangle_budget, seed);
    let measured_k = least_quasi_k(&table, p.triangle_budget, seed);
    let threshold = table.connectivity_threshold();
    let r = p.r.unwrap_or(threshold + 1);
    let connected = build_graph(&table, r).is_connected();
    let radii: Vec<usize> = if p.radius > 1 { vec![p.radius - 1, p.radius] } else { vec![p.radius] };
    let deltas: Vec<Value> =
        ctx.pool.install(|| radii.par_iter().map(|&rad| delta_at(ctx, rad)).collect::<Result<Vec<_>>>())?;
    let drift = match deltas.as_slice() {
        [a, b] => (a["delta"].as_f64().unwrap_or(f64::NAN) - b["delta"].as_f64().unwrap_or(f64::NAN)).abs(),
        _ => 0.0,
    };
    let leaves: Vec<usize> = (4..=8).collect();
    let tree: Vec<f64> = ctx.pool.install(|| {
        leaves.par_iter().map(|&n| tree_delta(n, p.delta_budget, seed)).collect::<Result<Vec<_>>>()
    })?;
    let tree_max = tree.iter().copied().fold(0.0, f64::max);

    let mut report = ctx.report("experiment axioms", csv_arg(csv));
    let mut t = Table::new(&["radius", "triples", "threshold", "r", "delta", "diameter"]);
    for d in &deltas {
        t.push(["radius", "triples", "threshold", "r", "delta", "diameter"].iter().map(|k| d[*k].to_string()).collect());
    }
    report.results = json!({
        "crossratio": {
            "four_sets": ax.four_sets, "five_sets": ax.five_sets, "c1_k": ax.c1_k, "c2_k": ax.c2_k, "k": k,
            "path_checks": ax.path_checks, "path_realized": ax.path_realized,
        },
        "triangle": { "checked": tri.checked, "violations": tri.violations, "worst_excess": tri.worst_excess },
        "quasi_metric": {
            "k": k, "checked": qm.checked, "violations": qm.violations, "worst_excess": qm.worst_excess,
            "least_passing_k": measured_k, "triples": table.len(),
        },
        "threshold": threshold,
        "r": r,
        "connected": connected,
        "delta": deltas,
        "delta_drift": drift,
        "tree_delta": leaves.iter().zip(&tree).map(|(n, d)| json!({ "leaves": n, "delta": d })).collect::<Vec<_>>(),
    });
    let mut trunc = instance_truncation(&inst, p.quadruple_budget);
    trunc["five_budget"] = json!(p.five_budget);
    trunc["path_budget"] = json!(p.path_budget);
    trunc["triangle_budget"] = json!(p.triangle_budget);
    trunc["delta_budget"] = json!(p.delta_budget);
    trunc["triple_depth"] = json!(p.triple_depth);
    trunc["exhaustive"] = json!(ax.exhaustive);
    trunc["seed"] = json!(seed);
    report.truncation = trunc;
    report.check(
        "path property realized",
        ax.path_realized == ax.path_checks,
        format!("{} of {}", ax.path_realized, ax.path_checks),
    );
    report.check(
        "rho quasi-metric with the crossratio k",
        qm.violations == 0,
        format!("k = {k}: {} violations of {}, worst excess {}", qm.violations, qm.checked, qm.worst_excess),
    );
    report.check("graph connected", connected, format!("r = {r}"));
    report.check("delta drift below 1", drift < 1.0, format!("{drift}"));
    report.check("tree-model delta at most 1", tree_max <= 1.0, format!("{tree_max}"));
    finish(report, csv, t)
}

pub fn translation(ctx: &Ctx, csv: Option<&Path>) -> Result<Output> {
    let cfg = &ctx.loaded.config;
    let e = &cfg.experiment.translation;
    let p = &cfg.params;
    let (name, f) = ctx.dynamics(&e.map)?;
    let mut inst = ctx.instance(p.out_params())?;
    let x = canonical_triple(&inst)?;
    let r = translation_length(&mut inst, &x, &f, e.nmax, p.triple_depth, p.r)?;
    let mut report = ctx.report("experiment translation", csv_arg(csv));
    let mut table = Table::new(&["n", "rho", "graph"]);
    for (n, rho, d) in &r.rows {
        table.push(vec![n.to_string(), rho.to_string(), d.map_or(String::new(), |d| d.to_string())]);
    }
    report.results = json!({
        "map": name,
        "x": triple_json(&x, &ctx.map_names()?),
        "rows": r.rows.iter().map(|(n, rho, d)| json!({ "n": n, "rho": rho, "graph": d })).collect::<Vec<_>>(),
        "metric": match r.metric { Metric::Graph => "graph", Metric::Rho => "rho" },
        "slope": r.slope,
        "r": r.r,
        "off_sample": r.off_sample,
    });
    let mut trunc = instance_truncation(&inst, 0);
    trunc["nmax"] = json!(e.nmax);
    trunc["triple_depth"] = json!(p.triple_depth);
    report.truncation = trunc;
    if r.off_sample > 0 {
        report.warn(format!("{} orbit points lie outside the sample", r.off_sample));
    }
    report.check(
        "translation slope",
        r.slope >= e.min_slope,
        format!("slope {} against {}", r.slope, e.min_slope),
    );
    finish(report, csv, table)
}

pub fn orbit(ctx: &Ctx, csv: Option<&Path>) -> Result<Output> {
    let cfg = &ctx.loaded.config;
    let e = &cfg.experiment.orbit;
    if e.gens.is_empty() {
        return Err(CliError::input("experiment.orbit.gens is empty"));
    }
    let gens = e.gens.iter().map(|n| ctx.world.aut(n).cloned()).collect::<Result<Vec<_>>>()?;
    let gamma = ConjClass::parse_nontrivial(&ctx.world.basis, &e.gamma)?;
    let mut inst = ctx.instance(cfg.params.out_params())?;
    let marker = inst.add_marker(Box::new(RoseMetric::collapsed(ctx.world.rank(), &e.collapsed)?))?;
    let x = canonical_triple(&inst)?;
    let o = orbit_diameter(&mut inst, &gens, &x, e.radius, &gamma, marker)?;
    let mut report = ctx.report("experiment orbit", csv_arg(csv));
    let mut table = Table::new(&["orbit_size", "diameter", "n", "bound"]);
    table.push(vec![o.orbit_size.to_string(), o.diameter.to_string(), o.n.to_string(), o.bound().to_string()]);
    report.results = json!({
        "gens": e.gens,
        "gamma": gamma.to_string(),
        "collapsed": e.collapsed,
        "x": triple_json(&x, &ctx.map_names()?),
        "orbit_size": o.orbit_size,
        "diameter": o.diameter,
        "n": o.n,
        "bound": o.bound(),
        "marker_values": o.marker_values,
        "lower_bound_ok": o.lower_bound_ok,
    });
    let mut trunc = instance_truncation(&inst, 0);
    trunc["stabilizer_radius"] = json!(e.radius);
    report.truncation = trunc;
    report.check("orbit diameter at most 2N+2", o.holds, format!("{} <= {}", o.diameter, o.bound()));
    finish(report, csv, table)
}

pub fn wpd(ctx: &Ctx, csv: Option<&Path>) -> Result<Output> {
    let cfg = &ctx.loaded.config;
    let e = &cfg.experiment.wpd;
    let (name, f) = ctx.dynamics(&e.map)?;
    let mut inst = ctx.instance(cfg.params.out_params())?;
    let x = canonical_triple(&inst)?;
    let ball = enumerate_ball_with_depth(&ctx.world.ball_gens(cfg)?, e.ball_radius)?;
    let rows = wpd_census(&mut inst, &f, &x, e.c, &e.ns, &ball)?;
    let mut report = ctx.report("experiment wpd", csv_arg(csv));
    let mut table = Table::new(&["n", "count"]);
    for r in &rows {
        table.push(vec![r.n.to_string(), r.count.to_string()]);
    }
    report.results = json!({
        "map": name,
        "c": e.c,
        "x": triple_json(&x, &ctx.map_names()?),
        "ball": ball.len(),
        "rows": rows.iter().map(|r| json!({ "n": r.n, "count": r.count, "members": r.members })).collect::<Vec<_>>(),
    });
    let mut trunc = instance_truncation(&inst, 0);
    trunc["ball_radius"] = json!(e.ball_radius);
    report.truncation = trunc;
    report.check(
        "identity counted",
        rows.iter().all(|r| r.members.first() == Some(&0)),
        "rho(x, x) = 0 for every N",
    );
    finish(report, csv, table)
}

pub fn treemodel(leaves: usize, csv: Option<&Path>) -> Result<Output> {
    let t = TreeModel::caterpillar(leaves)?;
    let mut cr = Crossratio::new(t.system()?);
    let n = t.num_points();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            pairs.push((a, b));
        }
    }
    let mut table = Table::new(&["x", "y", "z", "w", "crossratio", "oracle"]);
    let (mut checked, mut matched) = (0usize, 0usize);
    for &(x, y) in &pairs {
        for &(z, w) in &pairs {
            let v = cr.pairs(x, y, z, w);
            let oracle = t.subtree_distance(&[x, y], &[z, w]) as u32;
            checked += 1;
            matched += usize::from(v == oracle);
            table.push(vec![
                x.to_string(),
                y.to_string(),
                z.to_string(),
                w.to_string(),
                v.to_string(),
                oracle.to_string(),
            ]);
        }
    }
    let pts: Vec<usize> = (0..n).collect();
    let budget = 1 << 20;
    let ax = crossratio_axioms(&mut cr, &pts, budget, budget, budget, 1);
    let mut triples = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                triples.push([a, b, c]);
            }
        }
    }
    let (mut centers, mut centers_ok) = (0usize, 0usize);
    for (i, &u) in triples.iter().enumerate() {
        let cu = t.center(u[0], u[1], u[2]);
        let dist = t.distances_from(cu);
        for &v in &triples[i + 1..] {
            let cv = t.center(v[0], v[1], v[2]);
            centers += 1;
            centers_ok += usize::from(rho(&mut cr, u, v) as usize == dist[cv]);
        }
    }
    let mut report = Report::new("experiment treemodel", json!({ "leaves": leaves }), Value::Null);
    report.results = json!({
        "leaves": n,
        "vertices": t.num_vertices(),
        "annuli": cr.system().len(),
        "pair_pairs": checked,
        "matched": matched,
        "axioms": { "k": ax.k(), "c1_k": ax.c1_k, "c2_k": ax.c2_k, "path_checks": ax.path_checks, "path_realized": ax.path_realized },
        "rho_pairs": centers,
        "rho_matches_center_distance": centers_ok,
    });
    report.truncation = json!({ "budget": budget, "exhaustive": ax.exhaustive });
    report.check("oracle match", matched == checked, format!("{matched} of {checked}"));
    report.check("crossratio axioms with k = 0", ax.k() == 0, format!("k = {}", ax.k()));
    report.check("rho is the center distance", centers_ok == centers, format!("{centers_ok} of {centers}"));
    finish(report, csv, table)
}
