use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lossorder"));
    c.env_remove("LOSSORDER_KMAX");
    c
}

fn fixture(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    p.to_string_lossy().into_owned()
}

fn schema(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("terminated by signal")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn assert_valid(schema_file: &str, doc: &Value) {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema(schema_file)).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:?}");
}

fn rel_close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * b.abs()
}

#[test]
fn gumbel_moment_table() {
    let o = run(&["compare", "gumbel:31.0063,1.74346", "gumbel:32.0063,1.74346", "--moments", "5"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let rows = r["moment_table"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let first = [30.0, 905.0, 27437.3, 835606.0, 2.55545e7];
    let second = [31.0, 966.0, 30243.3, 950906.0, 3.00162e7];
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row["k"], i + 1);
        assert!(rel_close(row["first"].as_f64().unwrap(), first[i], 1e-3), "{row}");
        assert!(rel_close(row["second"].as_f64().unwrap(), second[i], 1e-3), "{row}");
    }
    assert!(r.get("x0").is_none());
}

#[test]
fn self_comparison_is_equivalent() {
    let o = run(&["compare", "weibull:20,10", "weibull:20,10"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["verdict"]["relation"], "equivalent");
}

#[test]
fn outbreak_table_threshold() {
    let o = run(&[
        "compare",
        &format!("{}:config2", fixture("table2.csv")),
        &format!("{}:config1", fixture("table2.csv")),
        "--threshold",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["x0"]["x0"].as_f64(), Some(9.0));
}

#[test]
fn rating_groups_threshold_label() {
    let t = fixture("table1.csv");
    let o = run(&["compare", &format!("{t}:scenario=1"), &format!("{t}:scenario=2"), "--threshold"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["x0"]["label"], "M");
}

#[test]
fn swapping_inputs_swaps_exit_code() {
    assert_eq!(code(&run(&["compare", "gamma:260.345,0.0373929", "weibull:20,10"])), 1);
    assert_eq!(code(&run(&["compare", "weibull:20,10", "gamma:260.345,0.0373929"])), 0);
}

#[test]
fn interleaved_lattices_are_incomparable() {
    let o = run(&["compare", "lattice:3,2,2", "lattice:3,2,3", "--threshold"]);
    assert_eq!(code(&o), 3);
    assert!(json(&o).get("x0").is_none());
}

#[test]
fn json_source_matches_inline_spec() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.json");
    std::fs::write(&p, r#"{"kind": "parametric", "family": "gamma", "parameters": [2.0, 3.0]}"#).unwrap();
    let o = run(&["compare", p.to_str().unwrap(), "gamma:2,3"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn truncated_sources() {
    let o = run(&["compare", "gaussian:3,1@1,5", "gaussian:3,1@1,6"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["verdict"]["decided_by"], "support_bound");
}

#[test]
fn malformed_sources_exit_10() {
    for bad in ["gumbel:1", "gumbel:x,y", "nosuch:1,2", "missing.json", "table.csv", "gamma:-1,2"] {
        let o = run(&["compare", bad, "gamma:2,3"]);
        assert_eq!(code(&o), 10, "{bad}");
        assert!(!o.stderr.is_empty(), "{bad}: no diagnostic");
        assert!(o.stdout.is_empty(), "{bad}: report written");
    }
    assert_eq!(code(&run(&["compare", "gamma:2,3"])), 10);
    assert_eq!(code(&run(&["frobnicate"])), 10);
}

#[test]
fn kmax_from_environment() {
    let args = ["compare", "gamma:260.345,0.0373929", "weibull:20,10"];
    let o = bin().args(args).env("LOSSORDER_KMAX", "128").output().unwrap();
    assert_eq!(code(&o), 1);
    let o = bin().args(args).env("LOSSORDER_KMAX", "many").output().unwrap();
    assert_eq!(code(&o), 10);
}

#[test]
fn help_exits_cleanly() {
    let o = run(&["compare", "--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("gumbel:LOC,SCALE"));
}

#[test]
fn nile_halves() {
    let o = run(&["kde", &fixture("nile.csv"), "--split", "50"]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    let h = &r["kde"]["bandwidths"];
    assert!(rel_close(h[0].as_f64().unwrap(), 79.32, 0.01), "{h}");
    assert!(rel_close(h[1].as_f64().unwrap(), 45.28, 0.01), "{h}");
    assert_eq!(r["kde"]["sample_sizes"], serde_json::json!([50, 50]));
}

#[test]
fn cvss_scores_by_scenario() {
    let o = run(&["kde", &fixture("table1.csv"), "--group-by", "scenario"]);
    assert_eq!(code(&o), 1);
    let h = &json(&o)["kde"]["bandwidths"];
    assert!(rel_close(h[0].as_f64().unwrap(), 0.798, 0.01), "{h}");
    assert!(rel_close(h[1].as_f64().unwrap(), 0.346, 0.01), "{h}");
}

#[test]
fn constant_series_uses_fallback_bandwidth() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("flat.csv");
    std::fs::write(&p, "v\n5\n5\n5\n5\n5\n5\n").unwrap();
    let o = run(&["kde", p.to_str().unwrap(), "--split", "3", "--threshold", "--plot-data"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let h = json(&o)["kde"]["bandwidths"][0].as_f64().unwrap();
    assert!(h > 0.0 && h.is_finite());
}

#[test]
fn too_few_points_per_half() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("short.csv");
    std::fs::write(&p, "v\n1\n2\n3\n").unwrap();
    assert_eq!(code(&run(&["kde", p.to_str().unwrap(), "--split", "1"])), 10);
    assert_eq!(code(&run(&["kde", p.to_str().unwrap(), "--split", "3"])), 10);
}

fn csv_row(o: &Output, size: usize) -> String {
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    text.lines().nth(size).unwrap().to_string()
}

#[test]
fn simulate_edge_cases() {
    let o = run(&["simulate", "--p", "0", "--runs", "100"]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_row(&o, 1), "1,100");
    let o = run(&["simulate", "--p", "1", "--graph", "complete:20", "--runs", "50"]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_row(&o, 20), "20,50");
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| {
        let p = dir.path().join(name);
        let o = run(&["simulate", "--p", "0.2", "--p", "0.3", "--runs", "500", "--seed", "7", "-o", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        std::fs::read(p).unwrap()
    };
    assert_eq!(out("a.csv"), out("b.csv"));
}

#[test]
fn simulated_table_round_trips_into_compare() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("sim.csv");
    let ps = p.to_str().unwrap();
    assert_eq!(code(&run(&["simulate", "--p", "0.05", "--p", "0.3", "--runs", "2000", "-o", ps])), 0);
    let o = run(&["compare", &format!("{ps}:config1"), &format!("{ps}:config2"), "--threshold"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn simulate_rejects_bad_config() {
    assert_eq!(code(&run(&["simulate", "--p", "1.5"])), 10);
    assert_eq!(code(&run(&["simulate", "--p", "0.5", "--graph", "complete:x"])), 10);
    assert_eq!(code(&run(&["simulate", "--p", "0.5", "--initial", "99"])), 10);
}

#[test]
fn reproduce_single_check() {
    let o = run(&["reproduce", "--only", "example1", "--json"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r.as_array().unwrap().len(), 1);
    assert_eq!(r[0]["name"], "example1");
    assert_eq!(r[0]["pass"], true);
}

#[test]
fn reproduce_full_run() {
    let o = run(&["reproduce", "--json"]);
    let r = json(&o);
    let names: Vec<&str> = r.as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["example1", "example2", "example3", "table1", "table2", "nile", "cvss"]);
    let failing: Vec<&str> = r.as_array().unwrap().iter().filter(|c| c["pass"] == false).map(|c| c["name"].as_str().unwrap()).collect();
    // The river-flow threshold lies near 704, outside the published [150, 300].
    assert_eq!(failing, ["nile"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nile"));
}

#[test]
fn corrupted_fixture_names_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("table2.csv")).unwrap();
    let broken = text.replace("20,37,10", "20,37,1O");
    assert_ne!(broken, text);
    std::fs::write(dir.path().join("table2.csv"), broken).unwrap();
    let o = run(&["reproduce", "--only", "table2", "--only", "example1", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("table2") && !err.contains("example1"), "{err}");
}

#[test]
fn unknown_check_is_a_usage_error() {
    assert_eq!(code(&run(&["reproduce", "--only", "example9"])), 10);
}

#[test]
fn reports_match_schemas() {
    let t1 = fixture("table1.csv");
    let t2 = fixture("table2.csv");
    let nile = fixture("nile.csv");
    let reports: Vec<Vec<String>> = vec![
        vec!["compare", "gumbel:31.0063,1.74346", "gumbel:32.0063,1.74346", "--moments", "8", "--threshold", "--plot-data"],
        vec!["compare", "gamma:260.345,0.0373929", "weibull:20,10", "--threshold", "--evidence"],
        vec!["compare", "gaussian:3,1", "gaussian:3,1", "--plot-data"],
        vec!["compare", "lattice:3,2,2", "lattice:3,2,3", "--plot-data", "--threshold"],
        vec!["compare", "point:3", "uniform:1,4", "--threshold", "--plot-data", "--moments", "3"],
        vec!["compare", &format!("{t2}:config2"), &format!("{t2}:config1"), "--threshold", "--evidence", "--plot-data"],
        vec!["compare", &format!("{t1}:scenario=1"), &format!("{t1}:scenario=2"), "--threshold", "--plot-data"],
        vec!["kde", &nile, "--split", "50", "--threshold", "--plot-data", "--moments", "4"],
        vec!["kde", &t1, "--group-by", "scenario", "--threshold"],
    ]
    .into_iter()
    .map(|a| a.into_iter().map(String::from).collect())
    .collect();
    for args in reports {
        let o = bin().args(&args).output().unwrap();
        assert!(code(&o) <= 3, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_valid("comparison-report.schema.json", &json(&o));
    }
    let o = run(&["simulate", "--p", "0.3", "--p", "0.6", "--runs", "200", "--format", "json", "--initial", "0"]);
    assert_valid("simulation.schema.json", &json(&o));
    let o = run(&["simulate", "--p", "0.3", "--runs", "20", "--format", "json", "--graph", "erdos-renyi:30,0.1,4"]);
    assert_valid("simulation.schema.json", &json(&o));
    assert_valid("reproduce.schema.json", &json(&run(&["reproduce", "--json"])));
}
