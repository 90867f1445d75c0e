//! Acceptance criteria 1 to 10, one PASS/FAIL line each.
//!
//! Criteria 5 to 8 and 10 run the binary on the shipped configs; the rest
//! call the library directly against independent oracles. Every command
//! runs twice and the byte streams feed criterion 10.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use outhyp_core::aut::enumerate_ball;
use outhyp_core::class::classes_up_to;
use outhyp_core::limits::{
    dual_current, pairing_current_sequence, stable_current, MapPair, Sign, TreePoint, DEFAULT_KMAX, DEFAULT_TOL,
};
use outhyp_core::train_track::TrainTrackMap;
use outhyp_core::{is_primitive, nielsen_generators, Basis, ConjClass, FreeGroupAut, Letter, WhiteheadGraph, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_outhyp");

fn shipped(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("config").join(name).display().to_string()
}

struct Line {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

#[derive(Default)]
struct Runs {
    /// Commands whose two runs differed.
    differing: Vec<String>,
    commands: usize,
}

impl Runs {
    /// Runs the binary twice; returns the first report, exit code and
    /// wall time. `files` are side outputs compared along with stdout.
    fn twice(&mut self, args: &[&str], files: &[&Path], report_file: Option<&Path>) -> (Value, i32, Duration) {
        let mut seen = Vec::new();
        let mut first = None;
        for _ in 0..2 {
            let start = Instant::now();
            let o = Command::new(BIN).args(args).env_remove("OUTHYP_OUT_DIR").output().expect("binary runs");
            let elapsed = start.elapsed();
            let code = o.status.code().expect("exit code");
            let mut bytes = vec![o.stdout.clone()];
            for f in files {
                bytes.push(std::fs::read(f).unwrap_or_default());
            }
            if first.is_none() {
                let text = match report_file {
                    Some(p) => std::fs::read(p).unwrap_or_default(),
                    None => o.stdout.clone(),
                };
                let report = serde_json::from_slice(&text).unwrap_or_else(|e| {
                    panic!("{args:?}: {e}: {}", String::from_utf8_lossy(&o.stderr));
                });
                first = Some((report, code, elapsed));
            }
            seen.push(bytes);
        }
        self.commands += 1;
        if seen[0] != seen[1] {
            self.differing.push(args.join(" "));
        }
        first.unwrap()
    }
}

fn fib() -> FreeGroupAut {
    FreeGroupAut::parse(2, &["ab", "a"], Some(&["b", "Ba"])).unwrap()
}

fn gen(i: usize) -> Word {
    Word::reduce([Letter::new(i, false)])
}

fn results(r: &Value) -> &Value {
    &r["results"]
}

fn tree_model(runs: &mut Runs) -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for leaves in 3..=8 {
        let n = leaves.to_string();
        let (r, code, _) = runs.twice(&["experiment", "treemodel", "--leaves", &n], &[], None);
        let res = results(&r);
        let exact = res["matched"] == res["pair_pairs"];
        let k0 = res["axioms"]["k"] == 0;
        ok &= exact && k0 && code == 0;
        notes.push(format!("{leaves}:{}/{} k={}", res["matched"], res["pair_pairs"], res["axioms"]["k"]));
    }
    (ok, notes.join(" "))
}

fn eigen_data(runs: &mut Runs) -> (bool, String) {
    let fib_cfg = shipped("fibonacci.toml");
    let r3_cfg = shipped("rank3.toml");
    let (a, _, _) = runs.twice(&["-c", &fib_cfg, "analyze", "--map", "fib"], &[], None);
    let (b, _, _) = runs.twice(&["-c", &r3_cfg, "analyze", "--map", "g3"], &[], None);
    let la = results(&a)["lambda"].as_f64().unwrap();
    let lb = results(&b)["lambda"].as_f64().unwrap();
    let ra = results(&a)["residual"].as_f64().unwrap();
    let rb = results(&b)["residual"].as_f64().unwrap();
    let ok = (la - 1.618_033_988_7).abs() <= 1e-9 && (lb - 1.324_717_957_2).abs() <= 1e-9 && ra < 1e-9 && rb < 1e-9;
    (ok, format!("fib {la:.12} (residual {ra:.1e}), rank 3 {lb:.12} (residual {rb:.1e})"))
}

/// Letter frequencies of the untightened word `f^k(a)`.
fn direct_count(f: &FreeGroupAut, k: usize) -> [f64; 2] {
    let mut w = gen(0);
    for _ in 0..k {
        w = f.apply(&w);
    }
    let mut counts = [0usize; 2];
    for l in w.letters() {
        counts[l.generator()] += 1;
    }
    counts.map(|c| c as f64 / w.len() as f64)
}

fn current_frequencies() -> (bool, String) {
    let tt = TrainTrackMap::new(fib()).unwrap();
    let c = stable_current(&tt, 1, 30).unwrap();
    let (fa, fb) = (c.freq(&gen(0)), c.freq(&gen(1)));
    let direct = direct_count(&fib(), 30);
    let mut ok = (fa - direct[0]).abs() < 1e-6 && (fb - direct[1]).abs() < 1e-6;
    ok &= (fa - 0.61803).abs() < 1e-5 && (fb - 0.38197).abs() < 1e-5;
    let mut worst: f64 = 0.0;
    for l in 2..=3 {
        let upper = stable_current(&tt, l, 30).unwrap();
        let lower = stable_current(&tt, l - 1, 30).unwrap();
        for (w, f) in upper.marginal() {
            worst = worst.max((f - lower.freq(&w)).abs());
        }
    }
    ok &= worst < 1e-6;
    (ok, format!("({fa:.7}, {fb:.7}) vs direct ({:.7}, {:.7}); marginal gap {worst:.1e}", direct[0], direct[1]))
}

fn pairing_duals() -> (bool, String) {
    let f = fib();
    let p = MapPair::new(TrainTrackMap::new(f.clone()).unwrap(), Some(TrainTrackMap::new(f.inverse().unwrap()).unwrap()))
        .unwrap();
    let tplus = p.tree(Sign::Plus, DEFAULT_TOL, DEFAULT_KMAX).unwrap();
    let id = FreeGroupAut::identity(2);
    let minus = dual_current(&p, Sign::Plus, 1, 20).unwrap();
    let plus = dual_current(&p, Sign::Minus, 1, 20).unwrap();
    let dual = pairing_current_sequence(TreePoint::new(&tplus, &id), &minus.recipe, 1..=20).unwrap();
    let own = pairing_current_sequence(TreePoint::new(&tplus, &id), &plus.recipe, 5..=20).unwrap();
    let last_dual = dual.last().unwrap().1;
    let floor = 0.1 * own[0].1;
    let min_own = own.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    let ok = last_dual < 1e-3 && own[0].1 > 0.0 && min_own >= floor;
    (ok, format!("dual at k=20 {last_dual:.2e}; own min {min_own:.4} against floor {floor:.4}"))
}

fn t2(runs: &mut Runs, csv: &Path) -> (bool, String) {
    let cfg = shipped("fibonacci.toml");
    let (r, _, _) = runs.twice(&["-c", &cfg, "experiment", "t2", "--csv", csv.to_str().unwrap()], &[csv], None);
    let res = results(&r);
    let delta = res["delta"].as_f64().unwrap_or(0.0);
    let ceiling = res["ceiling"].as_f64().unwrap_or(f64::INFINITY);
    let all_primitive = r["config"]["experiment"]["t2"]["all_classes"] == false;
    let ok = delta > 0.0 && ceiling.is_finite() && all_primitive && r["config"]["experiment"]["t2"]["max_len"] == 8;
    (ok, format!("delta {delta:.5} over {} primitive classes, ceiling M {ceiling:.5}", res["classes"]))
}

fn axiom_scans(runs: &mut Runs, csv: &Path) -> (bool, String) {
    let cfg = shipped("fibonacci.toml");
    let (r, _, _) = runs.twice(&["-c", &cfg, "experiment", "a1a2", "--csv", csv.to_str().unwrap()], &[csv], None);
    let rows = results(&r)["radii"].as_array().unwrap().clone();
    let at = |rad: u64| rows.iter().find(|x| x["radius"] == rad).cloned().unwrap_or(Value::Null);
    let (r3, r4) = (at(3), at(4));
    let eps_ok = r["config"]["params"]["eps"] == 0.05;
    let a2 = r4["a2_k"] == 0 && r4["quadruples"].as_u64().unwrap_or(0) >= 10_000;
    let a1 = !r3["a1_max"].is_null() && r3["a1_max"] == r4["a1_max"];
    (
        eps_ok && a2 && a1,
        format!(
            "A2 k {} on {} quadruples at radius 4; A1 max {} at radius 3, {} at radius 4",
            r4["a2_k"], r4["quadruples"], r3["a1_max"], r4["a1_max"]
        ),
    )
}

fn hyperbolicity(runs: &mut Runs, csv: &Path) -> (bool, String) {
    let cfg = shipped("fibonacci.toml");
    let (r, _, _) = runs.twice(&["-c", &cfg, "experiment", "axioms", "--csv", csv.to_str().unwrap()], &[csv], None);
    let res = results(&r);
    let qm = &res["quasi_metric"];
    let quasi = qm["k"] == res["crossratio"]["k"] && qm["violations"] == 0;
    let connected = res["connected"] == true;
    let deltas: Vec<f64> = res["delta"].as_array().unwrap().iter().filter_map(|d| d["delta"].as_f64()).collect();
    let drift = res["delta_drift"].as_f64().unwrap_or(f64::INFINITY);
    let hyperbolic = deltas.len() == 2 && deltas.iter().all(|d| d.is_finite()) && drift < 1.0;
    let tree = res["tree_delta"].as_array().unwrap().iter().all(|t| t["delta"].as_f64().is_some_and(|d| d <= 1.0));
    (
        quasi && connected && hyperbolic && tree,
        format!(
            "triangle at k = {}: {} violations of {} (least passing k {}); connected {connected}; delta {deltas:?}, drift {drift}; tree-model delta at most 1: {tree}",
            qm["k"], qm["violations"], qm["checked"], qm["least_passing_k"]
        ),
    )
}

fn translation_orbits(runs: &mut Runs, csv: &Path) -> (bool, String) {
    let cfg = shipped("fibonacci.toml");
    let (t, _, _) =
        runs.twice(&["-c", &cfg, "experiment", "translation", "--csv", csv.to_str().unwrap()], &[csv], None);
    let (o, _, _) = runs.twice(&["-c", &cfg, "experiment", "orbit", "--csv", csv.to_str().unwrap()], &[csv], None);
    let slope = results(&t)["slope"].as_f64().unwrap_or(0.0);
    let nmax_ok = r_u64(&t["config"]["experiment"]["translation"]["nmax"]) == 8;
    let (d, n) = (r_u64(&results(&o)["diameter"]), r_u64(&results(&o)["n"]));
    let ok = slope >= 0.1 && nmax_ok && d <= 2 * n + 2;
    (ok, format!("slope {slope} over N <= 8; orbit diameter {d} with N = {n}, bound {}", 2 * n + 2))
}

fn r_u64(v: &Value) -> u64 {
    v.as_u64().unwrap_or(u64::MAX / 4)
}

/// Primitive classes as images `[φ(x)]` of a basis letter under random
/// words in the Nielsen generators.
fn sampled_primitives(rank: usize, count: usize, seed: u64) -> Vec<ConjClass> {
    let gens = nielsen_generators(rank).unwrap();
    let inverses: Vec<FreeGroupAut> = gens.iter().map(|g| g.inverse().unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let mut phi = FreeGroupAut::identity(rank);
        for _ in 0..rng.random_range(1..=12) {
            let i = rng.random_range(0..gens.len());
            let g = if rng.random_bool(0.5) { &gens[i] } else { &inverses[i] };
            phi = phi.compose(g);
        }
        let c = ConjClass::from_word(&phi.apply(&gen(rng.random_range(0..rank))));
        if c.len() >= 2 {
            out.push(c);
        }
    }
    out
}

/// Primitive classes of length at most `max_len` in `F_2`, as images of
/// `a` under a ball of outer classes, grown until the set is stable.
fn primitive_by_orbit(max_len: usize) -> (BTreeSet<ConjClass>, usize) {
    let gens = nielsen_generators(2).unwrap();
    let mut prev = BTreeSet::new();
    for radius in 1.. {
        let set: BTreeSet<ConjClass> = enumerate_ball(&gens, radius)
            .unwrap()
            .iter()
            .map(|phi| ConjClass::from_word(&phi.apply(&gen(0))))
            .filter(|c| c.len() <= max_len)
            .collect();
        if radius > 2 && set == prev {
            return (set, radius);
        }
        prev = set;
    }
    unreachable!()
}

fn whitehead(seed: u64) -> (bool, String) {
    let mut bad = 0;
    let mut sampled = 0;
    for rank in [2, 3] {
        for c in sampled_primitives(rank, 1000, seed) {
            sampled += 1;
            if !WhiteheadGraph::of_class(&c, rank).unwrap().has_cut_vertex_or_disconnected() {
                bad += 1;
            }
        }
    }
    let b = Basis::new(2).unwrap();
    let (oracle, radius) = primitive_by_orbit(4);
    let mut mismatches = 0;
    let mut classes = 0;
    for c in classes_up_to(&b, 4) {
        classes += 1;
        let fast = is_primitive(&c, &b).unwrap();
        let slow = oracle.contains(&c) || oracle.contains(&c.inverse());
        mismatches += (fast != slow) as usize;
    }
    (
        bad == 0 && mismatches == 0,
        format!(
            "{bad} of {sampled} sampled primitives with a connected cut-free graph; {mismatches} mismatches over {classes} classes (orbit oracle stable at radius {radius})"
        ),
    )
}

fn complex_runs(runs: &mut Runs, dir: &Path) {
    let cfg = shipped("fibonacci.toml");
    let report = dir.join("complex.json");
    let dot = dir.join("g.dot");
    let (rs, ds) = (report.to_str().unwrap(), dot.to_str().unwrap());
    runs.twice(&["-c", &cfg, "-o", rs, "complex", "build", "--dot", ds], &[&report, &dot], Some(&report));
    let (checked, code, _) = runs.twice(&["complex", "check", "--input", rs], &[], None);
    assert_eq!(code, 0, "complex check: {}", checked["assertions"]);
}

fn other_runs(runs: &mut Runs, csv: &Path) {
    let cfg = shipped("fibonacci.toml");
    let c = csv.to_str().unwrap();
    runs.twice(&["-c", &cfg, "limits", "--map", "fib", "--sign", "+"], &[], None);
    runs.twice(&["-c", &cfg, "limits", "--map", "fib", "--sign", "-", "--g", "tau.fib"], &[], None);
    runs.twice(&["-c", &cfg, "experiment", "wpd", "--csv", c], &[csv], None);
}

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let csv: PathBuf = dir.path().join("out.csv");
    let mut runs = Runs::default();
    let mut lines = Vec::new();
    let secs = Duration::from_secs;
    let mut record = |id, name, budget, f: &mut dyn FnMut() -> (bool, String)| {
        let start = Instant::now();
        let (passed, detail) = f();
        lines.push(Line { id, name, passed, detail, elapsed: start.elapsed(), budget });
    };

    record(1, "tree-model exactness", secs(5), &mut || tree_model(&mut runs));
    record(2, "eigen-data", secs(1), &mut || eigen_data(&mut runs));
    record(3, "current frequencies", secs(5), &mut current_frequencies);
    record(4, "pairing duals", secs(10), &mut pairing_duals);
    record(5, "T2 experiment", secs(60), &mut || t2(&mut runs, &csv));
    record(6, "axiom scans", secs(600), &mut || axiom_scans(&mut runs, &csv));
    record(7, "quasi-metric and hyperbolicity", secs(600), &mut || hyperbolicity(&mut runs, &csv));
    record(8, "translation length vs bounded orbits", secs(300), &mut || translation_orbits(&mut runs, &csv));
    record(9, "Whitehead property", secs(30), &mut || whitehead(7));
    record(10, "determinism", secs(600), &mut || {
        complex_runs(&mut runs, dir.path());
        other_runs(&mut runs, &csv);
        (runs.differing.is_empty(), format!("{} commands run twice, differing: {:?}", runs.commands, runs.differing))
    });

    let mut failed = Vec::new();
    println!();
    for l in &lines {
        let in_time = l.elapsed <= l.budget;
        let pass = l.passed && in_time;
        println!(
            "{} {:>2} {}: {} [{:.2} s of {} s]",
            if pass { "PASS" } else { "FAIL" },
            l.id,
            l.name,
            l.detail,
            l.elapsed.as_secs_f64(),
            l.budget.as_secs()
        );
        if !pass {
            failed.push(l.id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
