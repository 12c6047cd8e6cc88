use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heron-descent")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn compute_json_for_fifteen() {
    let v = json(&["compute", "--n", "15", "--m", "1", "--format", "json"]);
    assert_eq!(v["quotient_generators"], serde_json::json!([[2, 2]]));
    assert_eq!(v["rank_upper_bound"], 1);
    assert_eq!(v["dimension"], 3);
    assert_eq!(v["theorem"]["applicable"], true);
    assert_eq!(v["theorem"]["agrees"], true);
    assert_eq!(v["members"].as_array().unwrap().len(), 8);
}

#[test]
fn compute_rejects_composite_q() {
    let o = run(&["compute", "--n", "7", "--m", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("QNotPrime: 7²+1 = 50"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn compute_even_three_is_trivial() {
    let v = json(&["compute", "--n", "3", "--m", "2", "--format", "json"]);
    assert_eq!(v["quotient_generators"], serde_json::json!([]));
    assert_eq!(v["rank_upper_bound"], 0);
    let text = stdout(&run(&["compute", "--n", "3", "--m", "2"]));
    assert!(text.contains("quotient   trivial"), "{text}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["compute", "--n", "15"]).status.code(), Some(1));
    assert_eq!(run(&["compute", "--n", "15", "--m", "1", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(run(&["compute", "--n", "16", "--m", "1"]).status.code(), Some(1));
    assert_eq!(run(&["compute", "--n", "15", "--m", "0"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn shallow_depth_surfaces_undecided() {
    let o = run(&["compute", "--n", "79", "--m", "1", "--depth", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("UndecidedVerdict"), "{}", stderr(&o));
}

#[test]
fn verify_single_row() {
    let o = run(&["verify-tables", "--row", "n=79,m-parity=odd"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("<(2, 2), (79, 158)>"), "{text}");
    assert!(text.contains("3/3 rows match"), "{text}");
    assert_eq!(run(&["verify-tables", "--row", "n=80"]).status.code(), Some(1));
    assert_eq!(run(&["verify-tables", "--row", "m=3"]).status.code(), Some(1));
}

#[test]
fn corrupted_fixture_fails_with_a_diff() {
    let dir = std::env::temp_dir().join(format!("heron-fixture-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = heron_descent::tables::BUILTIN;
    let bad = good.replacen("generators = [[2, 2]]", "generators = [[2, 2], [3, 3]]", 1);
    assert_ne!(good, bad);
    let path = dir.join("tables.toml");
    std::fs::write(&path, &bad).unwrap();
    let o = run(&["verify-tables", "--fixtures", path.to_str().unwrap(), "--row", "n=15,m-parity=odd"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("MISMATCH"), "{text}");
    assert!(text.contains("engine only {}, table only {(3, 3), (6, 6)}"), "{text}");

    std::fs::write(&path, "version = 2\nrow = []\n").unwrap();
    let o = run(&["verify-tables", "--fixtures", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("version 2"));
    let o = run(&["verify-tables", "--fixtures", dir.join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

const HEADER: &str = "n,q,k,dimension,rank_bound,theorem_applicable,agrees";

#[test]
fn scan_small_range() {
    let o = run(&["scan", "--n-min", "3", "--n-max", "20", "--m", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER);
    let ns: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["3", "5", "11", "15", "19"]);
    assert_eq!(lines[1], "3,5,1,2,0,true,true");
    assert_eq!(lines[4], "15,113,2,3,1,true,true");
}

#[test]
fn scan_edge_ranges() {
    let o = run(&["scan", "--n-min", "20", "--n-max", "22", "--m", "1"]);
    assert_eq!(stdout(&o), format!("{HEADER}\n"));
    let o = run(&["scan", "--n-min", "209", "--n-max", "209", "--m", "1"]);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows, ["209,21841,2,3,1,true,true"]);
    assert_eq!(run(&["scan", "--n-min", "9", "--n-max", "3", "--m", "1"]).status.code(), Some(1));
}

#[test]
fn points_certify_small_ranks() {
    for m in ["1", "2"] {
        let text = stdout(&run(&["points", "--n", "3", "--m", m]));
        assert!(text.contains("rank 0 certified"), "{text}");
    }
    let v = json(&["points", "--n", "15", "--m", "1", "--num-bound", "10000", "--format", "json"]);
    assert_eq!(v["rank_lower_bound"], 1);
    assert_eq!(v["rank_upper_bound"], 1);
    assert_eq!(v["certified"], true);
    let xs: Vec<&Value> = v["points"].as_array().unwrap().iter().map(|p| &p["x"]).collect();
    assert!(xs.contains(&&serde_json::json!(["-7744", "9409"])));
    assert_eq!(v["points"][0], Value::Null);
    assert_eq!(run(&["points", "--n", "3", "--m", "1", "--num-bound", "0"]).status.code(), Some(1));
}

#[test]
fn csv_outputs_have_headers() {
    let text = stdout(&run(&["compute", "--n", "3", "--m", "1", "--format", "csv"]));
    assert!(text.starts_with("b1,b2,place,status\n"));
    let text = stdout(&run(&["points", "--n", "3", "--m", "1", "--format", "csv"]));
    assert!(text.starts_with("x_num,x_den,y_num,y_den,b1,b2\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn oracle_check_single_curve() {
    let o = run(&["oracle-check", "--n", "15", "--m", "1", "--max-prime", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("3/3 prime checks agree"));
    assert_eq!(run(&["oracle-check", "--n", "15"]).status.code(), Some(1));
}

#[test]
fn output_is_byte_stable() {
    let args = ["compute", "--n", "79", "--m", "2", "--seed", "3", "--format", "json"];
    let a = run(&[&args[..], &["--workers", "1"]].concat());
    let b = run(&[&args[..], &["--workers", "4"]].concat());
    let c = run(&[&args[..], &["--workers", "1"]].concat());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let other_seed = run(&["compute", "--n", "79", "--m", "2", "--seed", "4", "--format", "json"]);
    let parsed = |o: &Output| serde_json::from_slice::<Value>(&o.stdout).unwrap()["members"].clone();
    assert_eq!(parsed(&a), parsed(&other_seed));
}
