use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sullivan"));
    c.env_remove("SULLIVAN_FORMAT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn schema() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(manifest().join("schema/run_report.schema.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&v).unwrap()
}

fn assert_valid(v: &Value) {
    let s = schema();
    let msgs: Vec<String> = match s.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("schema violations: {msgs:#?}\n{v:#}");
}

#[test]
fn cohomology_builtins() {
    let v = json(&["cohomology", "--builtin", "xr:5"]);
    assert_eq!(v["outputs"]["betti"]["total"], 26);
    let v = json(&["cohomology", "--builtin", "torus:3"]);
    assert_eq!(v["outputs"]["betti"]["per_degree"], serde_json::json!([1, 3, 3, 1]));
    let v = json(&["cohomology", "--builtin", "upper-tri:4"]);
    assert_eq!(v["outputs"]["betti"]["total"], 24);
    let v = json(&["cohomology", "--builtin", "upper-tri-lie:4"]);
    assert_eq!(v["outputs"]["betti"]["total"], 24);
    let v = json(&["cohomology", "--builtin", "xr:5*xr:5"]);
    assert_eq!(v["outputs"]["betti"]["total"], 676);
}

#[test]
fn representatives_and_twist() {
    let v = json(&["cohomology", "--builtin", "torus:2", "--representatives"]);
    assert_eq!(v["outputs"]["representatives"], serde_json::json!([["1"], ["x1", "x2"], ["x1*x2"]]));
    let v = json(&["cohomology", "--builtin", "xr:5", "--twist", "x5"]);
    let x4 = json(&["cohomology", "--builtin", "xr:4"]);
    let tw = v["outputs"]["betti"]["per_degree"].as_array().unwrap();
    let base = x4["outputs"]["betti"]["per_degree"].as_array().unwrap();
    assert_eq!(&tw[..base.len()], &base[..]);
    assert!(tw[base.len()..].iter().all(|b| b == 0));
}

#[test]
fn table1() {
    let v = json(&["table1"]);
    let rows = v["outputs"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!((rows[7]["torus_bound"].as_u64(), rows[7]["total"].as_u64()), (Some(128), Some(64)));
    assert_eq!((rows[9]["torus_bound"].as_u64(), rows[9]["total"].as_u64()), (Some(512), Some(180)));
    for row in &rows[1..=4] {
        assert!(row["total"].as_u64() >= row["torus_bound"].as_u64());
    }
    assert_eq!(rows[0]["total"], 4);
    assert_eq!(v["notes"].as_array().unwrap().len(), 1);
    assert_eq!(run(&["table1", "--max-r", "10"]).status.code(), Some(2));
}

#[test]
fn trc_and_scan() {
    let v = json(&["trc", "--n", "49", "--k", "26"]);
    assert_eq!(v["outputs"]["inequality_holds"], true);
    assert_eq!(v["outputs"]["d_nk"], 300);
    // 2^529 < 49^98, so the threshold is false at n = 49
    assert_eq!(v["outputs"]["stirling_threshold_holds"], false);
    let v = json(&["trc", "--n", "5"]);
    assert_eq!(v["outputs"]["k"], 4);
    assert_eq!(v["outputs"]["computed_total_betti"], 120);
    let v = json(&["trc", "--scan-min"]);
    assert_eq!(v["outputs"]["minimal_n"], 26);
    assert_eq!(run(&["trc", "--n", "3", "--k", "7"]).status.code(), Some(2));
    assert_eq!(run(&["trc"]).status.code(), Some(2));
}

#[test]
fn center_obstruction_split_shift() {
    let v = json(&["center", "--builtin", "upper-tri-lie:6"]);
    assert_eq!(v["outputs"]["center"]["dimension"], 1);
    assert_eq!(v["outputs"]["center"]["basis"], serde_json::json!(["X_6_1"]));
    let v = json(&["center", "--builtin", "xr:7"]);
    assert_eq!(v["outputs"]["center"]["basis"], serde_json::json!(["X7"]));

    let v = json(&["obstruction", "--builtin", "xr:5", "--rank", "2"]);
    assert_eq!(
        v["outputs"]["forced_generators"],
        serde_json::json!(["a", "b", "x1", "x2", "x3", "x4"])
    );
    assert_eq!(v["outputs"]["free_generators"], serde_json::json!(["x5"]));

    let v = json(&["split", "--n", "6", "--k", "4"]);
    assert_eq!(v["outputs"]["fiber_is_abelian"], true);
    assert_eq!(v["outputs"]["fiber_betti_total"], 64);
    let v = json(&["split", "--n", "5", "--k", "3"]);
    assert_eq!(v["outputs"]["fiber_is_abelian"], false);

    let v = json(&["shift", "--n", "4", "--kappa", "1"]);
    assert_eq!(v["outputs"]["totals_equal"], true);
    assert_eq!(v["outputs"]["shifted"]["total"], 24);
}

#[test]
fn certificate_and_ratio() {
    let v = json(&["certificate", "--product", "5,5"]);
    assert_eq!(v["outputs"]["total_betti"], 676);
    assert_eq!(v["outputs"]["torus_bound"], "1024");
    let v = json(&["certificate", "--r", "4"]);
    assert_eq!(v["outputs"]["verdict"], false);
    let out = run(&["ratio", "--from", "50", "--to", "60"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outputs"]["first_non_decrease"], serde_json::json!([50, 51]));
    assert_valid(&v);
}

#[test]
fn every_report_matches_schema() {
    let commands: &[&[&str]] = &[
        &["cohomology", "--builtin", "xr:3", "--representatives"],
        &["cohomology", "--builtin", "xr:3", "--twist", "x3"],
        &["table1", "--max-r", "6"],
        &["trc", "--n", "12"],
        &["trc", "--scan-min", "--max-n", "30"],
        &["certificate", "--r", "5"],
        &["split", "--n", "5", "--k", "4"],
        &["obstruction", "--builtin", "xr:4", "--rank", "1"],
        &["center", "--builtin", "upper-tri-lie:5"],
        &["shift", "--n", "3", "--kappa", "2"],
        &["verify-classes", "--builtin", "torus:1", "--class", "1", "--class", "x1"],
    ];
    for args in commands {
        let v = json(args);
        assert_eq!(v["schema_version"], 1);
        assert!(v["wall_time_ms"].is_number());
        assert_valid(&v);
    }
}

#[test]
fn golden_report_is_byte_stable() {
    let args = ["cohomology", "--builtin", "xr:5", "--omit-timing"];
    let a = run(&args).stdout;
    let b = bin().args(args).args(["--jobs", "1"]).output().unwrap().stdout;
    let golden = std::fs::read(manifest().join("tests/golden/xr5.json")).unwrap();
    assert_eq!(String::from_utf8(a).unwrap(), String::from_utf8(golden).unwrap());
    let v: Value = serde_json::from_slice(&b).unwrap();
    assert_eq!(v["outputs"]["betti"]["total"], 26);
}

#[test]
fn jobs_do_not_change_results() {
    let one = json(&["--jobs", "1", "cohomology", "--builtin", "upper-tri:5"]);
    let four = json(&["--jobs", "4", "cohomology", "--builtin", "upper-tri:5"]);
    assert_eq!(one["outputs"], four["outputs"]);
    assert_eq!(run(&["--jobs", "0", "table1"]).status.code(), Some(2));
}

#[test]
fn formats() {
    let out = run(&["--format", "csv", "trc", "--n", "49"]);
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    let field = |k: &str| rows.iter().find(|r| &r[0] == k).map(|r| r[1].to_string());
    assert_eq!(field("inequality_holds").as_deref(), Some("true"));

    let out = bin()
        .env("SULLIVAN_FORMAT", "md")
        .args(["cohomology", "--builtin", "torus:2", "--representatives"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("| degree | betti | representatives |\n|---|---|---|\n"));
    assert!(text.contains("| 1 | 2 | x1; x2 |"));

    let out = bin().env("SULLIVAN_FORMAT", "csv").args(["cohomology", "--builtin", "torus:2"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "degree,betti\n0,1\n1,2\n2,1\ntotal,4\n");
}

#[test]
fn csv_quotes_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.cdga");
    std::fs::write(&path, "algebra Q\ngen x : 1\ngen y : 1\nd x = 0\nd y = 0\n").unwrap();
    let out = bin()
        .args(["--format", "csv", "cohomology", "--representatives"])
        .arg(&path)
        .output()
        .unwrap();
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(&rows[1][2], "x; y");
}

#[test]
fn exit_codes_and_diagnostics() {
    assert_eq!(run(&["cohomology", "--builtin", "nope:3"]).status.code(), Some(2));
    assert_eq!(run(&["cohomology", "--builtin", "upper-tri:12"]).status.code(), Some(2));
    assert_eq!(run(&["cohomology", "--builtin", "upper-tri:8"]).status.code(), Some(2));
    assert_eq!(run(&["cohomology"]).status.code(), Some(2));
    assert_eq!(run(&["split", "--n", "4", "--k", "9"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cdga");
    std::fs::write(&path, "algebra A\ngen a : 1\ngen x1 : 2\nd a = 0\nd x1 = a*c\n").unwrap();
    let out = bin().arg("cohomology").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("5:10: error[E002]: unknown generator 'c'"), "{err}");

    let path = dir.path().join("dsq.cdga");
    std::fs::write(&path, "algebra B\ngen u : 2\ngen a : 1\ngen v : 3\nd u = 0\nd a = u\nd v = u*a\n").unwrap();
    let out = bin().arg("cohomology").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("v"));
}

#[test]
fn resource_ceilings() {
    let args = ["cohomology", "--builtin", "xr:2", "--twist", "x2", "--truncate", "50"];
    assert_eq!(run(&args).status.code(), Some(2));
    let out = bin().args(args).arg("--unsafe-large").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_classes() {
    let classes = manifest().join("../core/tests/data/x5_classes.txt");
    let c = classes.to_str().unwrap();
    let v = json(&["verify-classes", "--builtin", "xr:5", "--classes", c]);
    assert_eq!(v["outputs"]["spanning"], true);
    let out = run(&["verify-classes", "--builtin", "xr:5", "--class", "b*x2"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outputs"]["non_closed"], 0);
    assert_eq!(run(&["verify-classes", "--builtin", "xr:5", "--class", "q*a"]).status.code(), Some(2));
}

fn export_round_trip(name: &str, dir: &Path) {
    let out = run(&["export", "--builtin", name]);
    assert_eq!(out.status.code(), Some(0), "{name}");
    let path = dir.join(format!("{}.cdga", name.replace([':', ',', '*'], "_")));
    std::fs::write(&path, &out.stdout).unwrap();
    let p = path.to_str().unwrap();
    let from_file = json(&["cohomology", p]);
    let direct = json(&["cohomology", "--builtin", name]);
    assert_eq!(from_file["outputs"]["betti"], direct["outputs"]["betti"], "{name}");
    let again = run(&["cohomology", p]);
    assert_eq!(again.status.code(), Some(0));
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in [
        "xr:3",
        "upper-tri:4",
        "torus:3",
        "split:5,4",
        "shift:4,1",
        "upper-tri-lie:4",
        "xr-lie:3",
        "xr:2*torus:1",
    ] {
        export_round_trip(name, dir.path());
    }
}
