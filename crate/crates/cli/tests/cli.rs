use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_outhyp");

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("config").join(name)
}

fn fib_config() -> PathBuf {
    shipped("fibonacci.toml")
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("OUTHYP_OUT_DIR").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&o.stderr));
    })
}

/// The shipped Fibonacci config with one line replaced.
fn variant(dir: &Path, from: &str, to: &str) -> PathBuf {
    let src = std::fs::read_to_string(fib_config()).unwrap();
    assert!(src.contains(from), "{from}");
    let path = dir.join("variant.toml");
    std::fs::write(&path, src.replacen(from, to, 1)).unwrap();
    path
}

#[test]
fn analyze_fibonacci() {
    let c = fib_config();
    let o = run(&["-c", c.to_str().unwrap(), "analyze", "--map", "fib"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["schema"], 1);
    let lambda = r["results"]["lambda"].as_f64().unwrap();
    assert!((lambda - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-9);
    assert_eq!(r["results"]["train_track"], true);
    assert_eq!(r["results"]["inverse_certified"], true);
    assert_eq!(r["config"]["aut"]["fib"]["images"][0], "ab");
}

#[test]
fn analyze_rank_three() {
    let c = shipped("rank3.toml");
    let o = run(&["-c", c.to_str().unwrap(), "analyze", "--map", "g3"]);
    assert_eq!(code(&o), 0);
    let lambda = json(&o)["results"]["lambda"].as_f64().unwrap();
    assert!((lambda - 1.324_717_957_244_746).abs() < 1e-9);
}

#[test]
fn treemodel_matches_oracle() {
    let o = run(&["experiment", "treemodel", "--leaves", "6"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["results"]["matched"], r["results"]["pair_pairs"]);
    assert_eq!(r["results"]["axioms"]["k"], 0);
    assert!(run(&["experiment", "treemodel", "--leaves", "2"]).status.code() == Some(2));
}

#[test]
fn malformed_image_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = variant(dir.path(), "images = [\"ab\", \"a\"]", "images = [\"abX#\", \"a\"]");
    let o = run(&["-c", bad.to_str().unwrap(), "analyze", "--map", "fib"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("variant.toml:31:14"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn input_errors_exit_two() {
    let c = fib_config();
    let c = c.to_str().unwrap();
    assert_eq!(code(&run(&["-c", c, "transmogrify"])), 2);
    assert_eq!(code(&run(&["analyze", "--map", "fib"])), 2);
    assert_eq!(code(&run(&["-c", c, "analyze", "--map", "nope"])), 2);
    assert_eq!(code(&run(&["-c", c, "limits", "--map", "fib", "--g", "tau^x"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, "rank = 2\n[aut.f\nimages = []\n").unwrap();
    let o = run(&["-c", broken.to_str().unwrap(), "analyze", "--map", "f"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("broken.toml:2:"));
}

#[test]
fn limits_with_a_testset_file() {
    let dir = tempfile::tempdir().unwrap();
    let ts = dir.path().join("ts.txt");
    std::fs::write(&ts, "# classes\na\nb\n\nab\n").unwrap();
    let c = fib_config();
    let args = ["-c", c.to_str().unwrap(), "limits", "--map", "fib", "--sign", "+", "--testset", ts.to_str().unwrap()];
    let o = run(&args);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let v = &r["results"]["values"];
    let (a, b, ab) = (v["a"].as_f64().unwrap(), v["b"].as_f64().unwrap(), v["ab"].as_f64().unwrap());
    // a and b lie on a legal axis through ab: lengths add
    assert!((a + b - ab).abs() < 1e-9, "{a} {b} {ab}");
    assert!(r["results"]["k_used"].as_u64().unwrap() <= 60);
    std::fs::write(&ts, "a\n  aQ\n").unwrap();
    let o = run(&args);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ts.txt:2:3"));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let c = fib_config();
    let c = c.to_str().unwrap();
    for args in [
        vec!["analyze", "--map", "fib"],
        vec!["limits", "--map", "fib", "--sign", "-", "--g", "tau.fib"],
        vec!["complex", "build"],
        vec!["experiment", "t2"],
        vec!["experiment", "orbit"],
    ] {
        let mut outs = Vec::new();
        for _ in 0..2 {
            let csv = dir.path().join("t.csv");
            let mut full = vec!["-c", c];
            full.extend(&args);
            if args[0] == "experiment" {
                full.extend(["--csv", csv.to_str().unwrap()]);
            }
            let o = run(&full);
            assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
            let csv_text = std::fs::read(&csv).unwrap_or_default();
            outs.push((o.stdout, csv_text));
        }
        assert!(outs[0] == outs[1], "{args:?} differs between runs");
    }
}

#[test]
fn complex_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let c = fib_config();
    let report = dir.path().join("complex.json");
    let dot = dir.path().join("g.dot");
    let o = run(&["-c", c.to_str().unwrap(), "-o", report.to_str().unwrap(), "complex", "build", "--dot", dot.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let dot_text = std::fs::read_to_string(&dot).unwrap();
    assert!(dot_text.starts_with("graph G_r {"));
    let built: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let edges = built["results"]["graph"]["edges"].as_u64().unwrap() as usize;
    assert_eq!(dot_text.matches(" -- ").count(), edges);

    let o = run(&["complex", "check", "--input", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let checked = json(&o);
    assert!(checked["assertions"].as_array().unwrap().iter().all(|a| a["passed"] == true));

    let text = std::fs::read_to_string(&report).unwrap();
    let first = built["results"]["rho"][0].as_array().unwrap();
    let entry = |v: &Value| format!("\"rho\": [\n      [\n        {},\n        {},\n        {v}\n", first[0], first[1]);
    let (old, new) = (entry(&first[2]), entry(&Value::from(7)));
    assert!(text.contains(&old));
    std::fs::write(&report, text.replacen(&old, &new, 1)).unwrap();
    let o = run(&["complex", "check", "--input", report.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let failed: Vec<String> = json(&o)["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["passed"] == false)
        .map(|a| a["name"].as_str().unwrap().to_owned())
        .collect();
    assert_eq!(failed, ["recomputed rho"]);
}

#[test]
fn assertion_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let strict = variant(dir.path(), "min_slope = 0.1", "min_slope = 100.0");
    assert_eq!(code(&run(&["-c", strict.to_str().unwrap(), "experiment", "translation"])), 1);
    let lax = variant(dir.path(), "min_slope = 0.1", "min_slope = 0.0");
    assert_eq!(code(&run(&["-c", lax.to_str().unwrap(), "experiment", "translation"])), 0);
}

#[test]
fn degenerate_neighborhoods_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let wide = variant(dir.path(), "eps = 0.05 ", "eps = 0.2 ");
    let o = run(&["-c", wide.to_str().unwrap(), "complex", "build"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn output_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    let c = fib_config();
    let o = Command::new(BIN)
        .args(["-c", c.to_str().unwrap(), "-o", "sub/r.json", "experiment", "t2", "--csv", "sub/t2.csv"])
        .env("OUTHYP_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sub/r.json")).unwrap()).unwrap();
    assert!(r["results"]["delta"].as_f64().unwrap() > 0.0);
    let csv = std::fs::read_to_string(dir.path().join("sub/t2.csv")).unwrap();
    assert!(csv.starts_with("class,length,first,second,ratio\n"));
}
