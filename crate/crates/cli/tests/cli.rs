use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SIGNED_SQUARE: &str = r#"{"n": 4, "group": {"kind": "cyclic", "k": 2}, "edges": [[0, 1, 1, 0], [1, 2, 1, 0], [2, 3, 1, 0], [3, 0, 1, 1]]}"#;
const BALANCED_SQUARE: &str = r#"{"n": 4, "group": {"kind": "cyclic", "k": 2}, "edges": [[0, 1, 1, 1], [1, 2, 1, 1], [2, 3, 1, 0], [3, 0, 1, 0]]}"#;
const TRIANGLE: &str = r#"{"n": 3, "group": {"kind": "cyclic", "k": 2}, "edges": [[0, 1, 1, 0], [1, 2, 2, 1], [0, 2, 1, 0]], "measure": [1, 2, 1]}"#;

fn magneto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magneto")).args(args).env_remove("MAGNETO_BUDGET").output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    let stdout = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(stdout.lines().count(), 1, "stdout: {stdout}");
    serde_json::from_str(&stdout).unwrap()
}

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        Files { dir: tempfile::tempdir().unwrap() }
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn oracle_cycle_prints_closed_forms() {
    let out = magneto(&["oracle", "cycle", "--n", "4", "--k", "2", "--j", "1"]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(r["status"], "OK");
    assert_eq!(r["command"], "oracle");
    assert_eq!(r["results"]["iota"], 2.0);
    assert_eq!(r["results"]["h"], 0.5);
    let c3 = r["results"]["c_delta(3)"].as_f64().unwrap();
    assert!((c3 - 0.7937005).abs() < 1e-7);
}

#[test]
fn verify_all_on_signed_square_is_ok() {
    let files = Files::new();
    let g = files.write("g.json", SIGNED_SQUARE);
    let out = magneto(&["verify", s(&g), "--suite", "all", "--trials", "100", "--seed", "7"]);
    let r = report(&out);
    assert_eq!(out.status.code(), Some(0), "{r}");
    assert_eq!(r["status"], "OK");
    assert_eq!(r["results"]["violations"], 0);
    let suites = r["results"]["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 6);
    assert!(suites.iter().all(|x| x["skipped"].is_null() && x["checks"].as_u64().unwrap() > 0));
}

#[test]
fn balanced_graph_has_zero_cheeger_constant_on_v() {
    let files = Files::new();
    let g = files.write("b.json", BALANCED_SQUARE);
    let r = report(&magneto(&["cheeger", s(&g)]));
    assert_eq!(r["status"], "OK");
    assert_eq!(r["results"]["h"], 0.0);
    assert_eq!(r["results"]["argmin"], "V");
}

#[test]
fn sobolev_and_trace_skip_on_balanced_graphs() {
    let files = Files::new();
    let g = files.write("b.json", BALANCED_SQUARE);
    let r = report(&magneto(&["verify", s(&g), "--suite", "sobolev", "--trials", "5"]));
    assert_eq!(r["status"], "OK");
    assert!(r["results"]["suites"][0]["skipped"].is_string());
}

#[test]
fn cheeger_profile_lists_every_subset() {
    let files = Files::new();
    let g = files.write("t.json", TRIANGLE);
    let r = report(&magneto(&["cheeger", s(&g), "--profile"]));
    let rows = r["results"]["profile"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0]["subset"], "0x1");
    assert_eq!(rows[6]["subset"], "V");
    let min = rows.iter().map(|x| x["quotient"].as_f64().unwrap()).fold(f64::INFINITY, f64::min);
    assert_eq!(r["results"]["h"].as_f64().unwrap(), min);
}

#[test]
fn frustration_of_subsets() {
    let files = Files::new();
    let g = files.write("g.json", SIGNED_SQUARE);
    let whole = report(&magneto(&["frustration", s(&g)]));
    assert_eq!(whole["results"]["iota"], 2.0);
    assert_eq!(whole["results"]["exact"], true);
    let path = report(&magneto(&["frustration", s(&g), "--subset", "0x7"]));
    assert_eq!(path["results"]["iota"], 0.0);
    let heur = report(&magneto(&["frustration", s(&g), "--heuristic", "--restarts", "4", "--seed", "3"]));
    assert_eq!(heur["results"]["exact"], false);
    assert!(heur["results"]["iota"].as_f64().unwrap() >= 2.0 - 1e-12);
}

#[test]
fn isoperimetric_accepts_finite_and_infinite_dimensions() {
    let files = Files::new();
    let g = files.write("g.json", SIGNED_SQUARE);
    let r = report(&magneto(&["isoperimetric", s(&g), "--delta", "3"]));
    assert!((r["results"]["c_delta"].as_f64().unwrap() - 0.7937005).abs() < 1e-7);
    let r = report(&magneto(&["isoperimetric", s(&g), "--delta", "inf"]));
    assert_eq!(r["results"]["c_delta"], 0.5);
}

#[test]
fn identical_arguments_give_identical_stdout() {
    let files = Files::new();
    let g = files.write("g.json", SIGNED_SQUARE);
    let args = ["verify", s(&g), "--suite", "all", "--trials", "20", "--seed", "11"];
    let a = magneto(&args);
    let b = magneto(&args);
    assert_eq!(a.stdout, b.stdout);
    let c = magneto(&["verify", s(&g), "--suite", "all", "--trials", "20", "--seed", "12"]);
    assert_ne!(report(&a)["inputs"], report(&c)["inputs"]);
}

#[test]
fn product_output_round_trips() {
    let files = Files::new();
    let a = files.write("a.json", SIGNED_SQUARE);
    let b = files.write("b.json", TRIANGLE);
    let out = files.dir.path().join("p.json");
    let r = report(&magneto(&["product", s(&a), s(&b), "-o", s(&out)]));
    assert_eq!(r["status"], "OK");
    assert_eq!(r["results"]["factors"], 2);
    let text = std::fs::read_to_string(&out).unwrap();
    let p = magneto::io::parse_graph(&text).unwrap();
    assert_eq!(p.n(), 12);
    assert_eq!(p.edges().len(), 4 * 3 + 3 * 4);
    let again = report(&magneto(&["spectrum", s(&out)]));
    assert_eq!(again["results"]["eigenvalues"].as_array().unwrap().len(), 12);
}

#[test]
fn exit_codes_and_error_reports() {
    let files = Files::new();
    let g = files.write("g.json", SIGNED_SQUARE);
    let bad = files.write("bad.json", r#"{"n": 2, "group": {"kind": "cyclic", "k": 2}, "edges": [[0, 0, 1, 0]]}"#);

    let out = magneto(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["status"], "ERROR");
    assert!(report(&out)["results"]["error"].as_str().unwrap().starts_with("PARSE_ERROR"));

    let out = magneto(&["cheeger", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(report(&out)["results"]["error"].as_str().unwrap().contains("self-loop"));

    let out = magneto(&["frustration", s(&g), "--subset", "0x10"]);
    assert_eq!(out.status.code(), Some(1));

    let out = magneto(&["isoperimetric", s(&g), "--delta", "1"]);
    assert_eq!(out.status.code(), Some(1));

    let out = magneto(&["heat", s(&g), "--t", "-1"]);
    assert_eq!(out.status.code(), Some(1));

    assert_eq!(magneto(&["--help"]).status.code(), Some(0));
    assert_eq!(magneto(&["--version"]).status.code(), Some(0));
}

#[test]
fn budget_variable_caps_enumeration() {
    let files = Files::new();
    let g = files.write("g.json", SIGNED_SQUARE);
    let out = Command::new(env!("CARGO_BIN_EXE_magneto"))
        .args(["frustration", s(&g)])
        .env("MAGNETO_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(report(&out)["results"]["error"].as_str().unwrap().contains("budget"));
}

#[test]
fn heat_kernel_is_reported_as_matrices() {
    let files = Files::new();
    let g = files.write("g.json", SIGNED_SQUARE);
    let r = report(&magneto(&["heat", s(&g), "--t", "0"]));
    let re = r["results"]["re"].as_array().unwrap();
    for (u, row) in re.iter().enumerate() {
        for (v, x) in row.as_array().unwrap().iter().enumerate() {
            let want = if u == v { 1.0 } else { 0.0 };
            assert!((x.as_f64().unwrap() - want).abs() < 1e-12);
        }
    }
    let unsigned = report(&magneto(&["heat", s(&g), "--t", "1", "--unsigned"]));
    let signed = report(&magneto(&["heat", s(&g), "--t", "1"]));
    assert!(unsigned["results"]["trace"].as_f64().unwrap() > signed["results"]["trace"].as_f64().unwrap());
}

#[test]
fn timing_is_opt_in() {
    let r = report(&magneto(&["oracle", "cycle", "--n", "5", "--k", "3", "--j", "1"]));
    assert!(r["wall_time"].is_null());
    let r = report(&magneto(&["--timing", "oracle", "cycle", "--n", "5", "--k", "3", "--j", "1"]));
    assert!(r["wall_time"].as_f64().unwrap() >= 0.0);
}
