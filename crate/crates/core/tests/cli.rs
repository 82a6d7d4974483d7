mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

use common::fixture_path;

fn regmark(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regmark")).args(args).output().unwrap()
}

fn regmark_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_regmark"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fx(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

#[test]
fn validate_exit_codes() {
    assert_eq!(regmark(&["validate", &fx("figure1.rg")]).status.code(), Some(0));
    let bad = regmark_stdin(&["validate", "-"], "1 -- 2\n3 -> 1\n");
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("arrow points to a full-line node"));
    assert_eq!(regmark(&["validate", "/no/such/file.rg"]).status.code(), Some(2));
    assert_eq!(regmark_stdin(&["validate", "-"], "1 => 2\n").status.code(), Some(2));
}

#[test]
fn pairwise_listings() {
    let p3 = regmark(&["pairwise", &fx("figure1.rg"), "--property", "p3"]);
    assert_eq!(p3.status.code(), Some(0));
    assert!(stdout(&p3).lines().any(|l| l == "2 | 4 | 5,6"));
    let p4 = regmark(&["pairwise", &fx("figure1.rg"), "--property", "p4"]);
    assert!(stdout(&p4).lines().any(|l| l == "2 | 4 | 5"));
    let complete = regmark_stdin(&["pairwise", "-", "--property", "p2"], "1 ~~ 2\n3 -> 1\n3 -> 2\n");
    assert_eq!(complete.status.code(), Some(0));
    assert_eq!(stdout(&complete), "");
    assert_eq!(regmark(&["pairwise", &fx("figure1.rg"), "--property", "p9"]).status.code(), Some(2));
}

#[test]
fn separate_queries() {
    let f = fx("figure1.rg");
    let sep = regmark(&["separate", &f, "--a", "2", "--b", "4", "--c", "5,6,8,9"]);
    assert_eq!(stdout(&sep), "separated\n");
    let con = regmark(&["separate", &f, "--a", "2", "--b", "5", "--c", ""]);
    assert_eq!(stdout(&con), "connected\nwitness: 2 <- 5\n");
    let json = regmark(&["--format", "json", "separate", &f, "--a", "2", "--b", "5"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["separated"], false);
    assert_eq!(v["witness"], serde_json::json!([2, 5]));
    assert_eq!(regmark(&["separate", &f, "--a", "2", "--b", "2"]).status.code(), Some(2));
}

#[test]
fn verify_modes() {
    let f = fx("figure1.rg");
    let s = regmark(&["verify", &f, "--soundness"]);
    assert_eq!(s.status.code(), Some(0));
    assert!(stdout(&s).contains("p1: 26 statements, 0 failures"));
    let t = regmark(&["verify", &fx("small5.rg"), "--theorem1"]);
    assert_eq!(t.status.code(), Some(0));
    assert!(stdout(&t).contains("closures equal"));
    let g = regmark(&["verify", &f, "--gaussian", "--seed", "1"]);
    assert_eq!(g.status.code(), Some(0));
    assert!(stdout(&g).contains("p4: 26/26 hold"));
    let tight = regmark(&["verify", &f, "--theorem1", "--max-statements", "100"]);
    assert_eq!(tight.status.code(), Some(3));
    assert!(stdout(&tight).contains("inconclusive"));
    let env = Command::new(env!("CARGO_BIN_EXE_regmark"))
        .args(["verify", &f, "--theorem1"])
        .env("REGMARK_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(3));
}

#[test]
fn json_output_is_deterministic() {
    let args = ["--format", "json", "verify", &fx("figure1.rg"), "--soundness", "--gaussian", "--seed", "4"];
    let a = regmark(&args);
    let b = regmark(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let first = &v["soundness"][0];
    assert_eq!(first["property"], "p1");
    assert_eq!(first["failures"], serde_json::json!([]));
}

#[test]
fn order_sets_report() {
    let f = fx("figure1.rg");
    assert_eq!(stdout(&regmark(&["order", &f])), "1,2,3,4\n5\n6\n7\n8,9  context\n");
    let sets = regmark(&["sets", &f, "--pair", "2,4"]);
    assert!(stdout(&sets).starts_with("par={5,6} ant={5,6,8,9} pst={5,6,7,8,9}\n"));
    let report = stdout(&regmark(&["report", &f]));
    assert!(report
        .lines()
        .any(|l| l.split_whitespace().collect::<Vec<_>>() == ["2,4", "5,6,7,8,9", "5,6,8,9", "5,6", "5"]));
    let bad = regmark(&["sets", &f, "--pair", "2,4", "--ordering", "5;1,2,3,4;6;7;8,9"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn saturate_pipes_into_validate() {
    let sat = regmark(&["saturate", &fx("figure1.rg")]);
    assert_eq!(sat.status.code(), Some(0));
    let v = regmark_stdin(&["validate", "-"], &stdout(&sat));
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    let p = regmark_stdin(&["pairwise", "-", "--property", "p1"], &stdout(&sat));
    assert_eq!(stdout(&p), "");
}

#[test]
fn random_graphs_validate() {
    let a = regmark(&["random", "--nodes", "6", "--seed", "17"]);
    let b = regmark(&["random", "--nodes", "6", "--seed", "17"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(regmark_stdin(&["validate", "-"], &stdout(&a)).status.code(), Some(0));
    assert_eq!(regmark(&["random", "--nodes", "0"]).status.code(), Some(2));
}

#[test]
fn derive_prints_trace() {
    let d = regmark(&["derive", "--goal", "2|4|5,6,8,9", "--premises", &fx("p1_pair24.txt")]);
    assert_eq!(d.status.code(), Some(0));
    let text = stdout(&d);
    let rules: Vec<_> = text.lines().map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(rules, ["symmetry", "contraction", "decomposition"]);
    let json = regmark(&["--format", "json", "derive", "--goal", "2|4|5", "--premises", &fx("p3_pair24.txt")]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v[0]["rule"], "contraction");
    assert_eq!(v.as_array().unwrap().last().unwrap()["conclusion"], "2 | 4 | 5");
    let none = regmark_stdin(&["derive", "--goal", "1|2|-", "--premises", "-"], "");
    assert_eq!(none.status.code(), Some(1));
}
