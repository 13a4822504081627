use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn stabreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabreg")).args(args).env_remove("STABREG_CAPS").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stabreg-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn analyze_reports_index_vc_and_profile() {
    let out = stabreg(&["analyze", "Z/7", "0,1,2,3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["vc_left"]["dimension"], 2);

    let out = stabreg(&["analyze", "S/3", "{}"]);
    assert_eq!(json(&out)["stability"]["index"], 1);

    let v = json(&stabreg(&["analyze", "Z/12", "0,4,8"]));
    assert_eq!(v["stability"]["index"], 2);
    assert_eq!(v["is_coset"], true);
}

#[test]
fn decompose_exit_codes() {
    let out = stabreg(&["decompose", "Z/12", "0,4,8", "--epsilon", "1/4", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v[0]["error_count"], 0);
    assert_eq!(v[0]["verify"]["all_passed"], true);

    let out = stabreg(&["decompose", "Z/12", "0,1,2,3", "--mode", "supplied", "--k", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let out = stabreg(&["decompose", "Z/12", "0,1", "--epsilon", "3/4"]);
    assert_eq!(out.status.code(), Some(3));
    let out = stabreg(&["decompose", "Z/0", "0"]);
    assert_eq!(out.status.code(), Some(3));
    let out = stabreg(&["decompose", "Z/12", "0", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn normal_and_dnf_commands() {
    let out = stabreg(&["decompose-normal", "D/4", "0,1", "--epsilon", "1/2", "--epsilon", "1/8", "--verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[1]["normal"]["is_normal"], true);

    let out = stabreg(&["dnf", "Z/12", "coset:0,3", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)[0]["formula"]["round_trip"], true);
}

#[test]
fn tripling_command() {
    let out = stabreg(&["tripling", "ZxZ/6", "fiber:0|all", "--epsilon", "1/2", "--verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)[0]["error_count"], 0);

    let out = stabreg(&["tripling", "Z", "interval:0,3", "--mode", "supplied", "--k", "4"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn report_file_and_config() {
    let dir = scratch("config");
    let cfg = dir.join("config.json");
    fs::write(&cfg, r#"{"epsilon": ["1/2"], "verify": true, "caps": {"half_graph_k": 9}}"#).unwrap();
    let report = dir.join("report.json");
    let out = stabreg(&[
        "decompose",
        "Z/10",
        "coset:1,5",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(written, json(&out));
    assert_eq!(written[0]["epsilon"], "1/2");

    fs::write(&cfg, r#"{"epsilons": ["1/2"]}"#).unwrap();
    let out = stabreg(&["analyze", "Z/3", "0", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn cap_overrides_from_environment() {
    let run = |caps: &str| {
        Command::new(env!("CARGO_BIN_EXE_stabreg"))
            .args(["analyze", "Z/12", "0,4,8"])
            .env("STABREG_CAPS", caps)
            .output()
            .unwrap()
    };
    assert_eq!(run("max_order=8").status.code(), Some(3));
    assert_eq!(run("max_order=12").status.code(), Some(0));
    assert_eq!(run("bogus=1").status.code(), Some(3));
}

#[test]
fn oracle_suite_scope_and_fault_injection() {
    let dir = scratch("suite");
    let out = stabreg(&["oracle-suite", "--max-order", "0", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["subsets"], 0);

    let out = stabreg(&["oracle-suite", "--max-order", "4", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.join("suite.csv")).unwrap();
    // header plus 2 + 4 + 8 + 16 + 16 subsets of Z/1, Z/2, Z/3, Z/4, Z/2xZ/2
    assert_eq!(csv.lines().count(), 1 + 2 + 4 + 8 + 16 + 16);

    let out = stabreg(&["oracle-suite", "--max-order", "4", "--inject-fault", "vc-below-k", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    let cx = v["counterexamples"].as_array().unwrap();
    assert!(!cx.is_empty());
    assert!(cx.iter().all(|c| c["clause"] == "vc-below-k"));
    assert_eq!(v["totals"]["vc-below-k"]["pass"], 0);

    let out = stabreg(&["oracle-suite", "--inject-fault", "nonsense"]);
    assert_eq!(out.status.code(), Some(3));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn sweep_writes_canonical_rows() {
    let dir = scratch("sweep");
    let tasks = dir.join("tasks.json");
    fs::write(
        &tasks,
        r#"[
            {"group": "Z/12", "subset": "0,4,8", "epsilons": ["1/2", "1/8"]},
            {"group": "D/5", "subset": "perturb:coset:0,5,1,3", "seed": 2},
            {"group": "Z/8", "subset": "random:1/2,9", "mode": "override", "k": 5}
        ]"#,
    )
    .unwrap();
    let run = |jobs: &str, out: &str| {
        stabreg(&["sweep", "--tasks", tasks.to_str().unwrap(), "--jobs", jobs, "--out", dir.join(out).to_str().unwrap()])
    };
    let a = run("1", "one");
    let b = run("3", "three");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        fs::read(dir.join("one/sweep.csv")).unwrap(),
        fs::read(dir.join("three/sweep.csv")).unwrap()
    );
    let v = json(&a);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let keys: Vec<&str> = rows.iter().map(|r| r["task"].as_str().unwrap()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);

    let out = stabreg(&["sweep"]);
    assert_eq!(out.status.code(), Some(3));
    let _ = fs::remove_dir_all(&dir);
}
