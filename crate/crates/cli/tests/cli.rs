use std::process::{Command, Output};

use serde_json::Value;

fn thornlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thornlab")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (Value, i32) {
    let out = thornlab(args);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (v, out.status.code().unwrap())
}

#[test]
fn indep_dlo() {
    let (v, code) = report(&["indep", "--theory", "dlo", "--a", "0", "--b", "1", "--base", ""]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["independent"], Value::Bool(true));
    assert_eq!(v["oracle"]["verdict"], "true");
}

#[test]
fn rank_eq() {
    let (v, code) = report(&["rank", "--theory", "eq", "--p", "x=x", "--delta", "x=y", "--pi", "y=y", "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["rank"], 1);
}

#[test]
fn uth_dlo() {
    let (v, code) = report(&["uth", "--theory", "dlo", "--type-of", "0,1", "--base", ""]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["rank"], 2);
    assert_eq!(v["certificate"]["value"], 2);
}

#[test]
fn inconsistent_rank_is_minus_one() {
    let (v, code) = report(&["rank", "--theory", "dlo", "--p", "x < 0 & 0 < x", "--delta", "x=y", "--pi", "y=y"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["rank"], -1);
}

#[test]
fn saved_reports_recheck() {
    let dir = std::env::temp_dir().join(format!("thornlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cases: [&[&str]; 3] = [
        &["forks", "--theory", "erel", "--p", "E(x, 2.5)"],
        &["indep", "--theory", "eq", "--a", "#0,#1", "--b", "#1,#2"],
        &["uthstar", "--theory", "erel", "--type-of", "2.5"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let out = thornlab(args);
        assert_eq!(out.status.code(), Some(0));
        let path = dir.join(format!("r{i}.json"));
        std::fs::write(&path, &out.stdout).unwrap();
        let (v, code) = report(&["recheck", "--report", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{v}");
        assert_eq!(v["result"]["certificate_verified"], true);
        assert_eq!(v["result"]["result_matches"], true);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_exits_two() {
    let (v, code) = report(&["forks", "--theory", "dlo", "--p", "0 < x", "--strict"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "unknown");
}

#[test]
fn errors_exit_one() {
    let out = thornlab(&["forks", "--theory", "dlo", "--p", "x <"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert_eq!(thornlab(&["nonsense"]).status.code(), Some(1));
    assert_eq!(thornlab(&["holds", "--theory", "peano", "--p", "true"]).status.code(), Some(1));
}

#[test]
fn config_file_and_flags() {
    let dir = std::env::temp_dir().join(format!("thornlab-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bounds.cfg");
    std::fs::write(&path, "# bounds\nk-max = 3\npool-depth=2\n").unwrap();
    let cfg = path.to_str().unwrap();
    let (v, _) = report(&["holds", "--theory", "eq", "--p", "#0 = #0", "--config", cfg]);
    assert_eq!(v["bounds"]["budget"]["k_max"], 3);
    assert_eq!(v["bounds"]["budget"]["pool_depth"], 2);
    let (v, _) = report(&["holds", "--theory", "eq", "--p", "#0 = #0", "--config", cfg, "--k-max", "5"]);
    assert_eq!(v["bounds"]["budget"]["k_max"], 5);
    std::fs::write(&path, "colour = blue\n").unwrap();
    assert_eq!(thornlab(&["holds", "--theory", "eq", "--p", "true", "--config", cfg]).status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--suite", "symmetry", "--seed", "42", "--count", "6"];
    let (mut one, code) = report(&args);
    assert_eq!(code, 0);
    let (mut two, _) = report(&[&args[..], &["--jobs", "2"]].concat());
    assert_eq!(one["result"]["passed"], 6);
    one["wall_time_ms"] = Value::Null;
    two["wall_time_ms"] = Value::Null;
    assert_eq!(one["result"], two["result"]);
}

#[test]
fn small_commands() {
    let (v, _) = report(&["qe", "--theory", "dlo", "--p", "exists y. x < y & y < 1"]);
    assert_eq!(v["result"]["formula"], "x < 1");
    let (v, _) = report(&["count", "--theory", "erel", "--p", "E(x, 2.5) & cl(x) = @3"]);
    assert_eq!(v["result"]["count"], 0);
    let (v, _) = report(&["types", "--theory", "eq", "--vars", "x1,x2", "--base", "#0"]);
    assert_eq!(v["result"]["count"], 5);
    let (v, _) = report(&["lascar", "--theory", "dlo", "--a", "0,1", "--b", "1/2"]);
    assert_eq!(v["result"]["holds"], true);
    let (v, _) = report(&["morley", "--theory", "dlo", "--p", "x = 0"]);
    assert_eq!(v["result"]["no_consistent_sequence"], true);
}
