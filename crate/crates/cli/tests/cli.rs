use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvlab"))
        .args(args)
        .env_remove("TVLAB_SEED")
        .output()
        .expect("binary runs")
}

fn records(path: &Path) -> Vec<Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_distances_n8_records_every_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.jsonl");
    let o = tvlab(&["verify-distances", "--n", "8", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let recs = records(&out);
    assert_eq!(recs[0]["record"], "header");
    assert_eq!(recs[0]["config"]["n"], 8);
    let cube: Vec<&Value> = recs
        .iter()
        .filter(|r| r["record"] == "quantity" && r["name"] == "cube_distance")
        .collect();
    // 2^8 centers, 3 noise rates, 28 pairs
    assert_eq!(cube.len(), 256 * 3 * 28);
    for r in cube {
        let gap = (r["value"].as_f64().unwrap() - r["reference"].as_f64().unwrap()).abs();
        assert!(gap <= 1e-12);
    }
    let verdict = recs.iter().find(|r| r["record"] == "verdict").unwrap();
    assert_eq!(verdict["passed"], true);
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let common = ["confident-fail", "--n", "2000", "--trials", "40", "--seed", "3"];
    let run = |out: &Path, workers: &str| {
        let mut args = common.to_vec();
        args.extend(["--workers", workers, "--out", path_str(out)]);
        tvlab(&args)
    };
    assert!(run(&a, "1").status.code().is_some());
    assert!(run(&b, "3").status.code().is_some());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let c = dir.path().join("c.jsonl");
    tvlab(&["confident-fail", "--n", "2000", "--trials", "40", "--seed", "4", "--out", path_str(&c)]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn confident_fail_reference_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cf.jsonl");
    let o = tvlab(&[
        "confident-fail", "--n", "100000", "--rho", "0.3", "--t", "3", "--trials", "500", "--seed", "7", "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&out);
    let failure = recs
        .iter()
        .find(|r| r["record"] == "summary" && r["name"] == "noisy_majority_failure")
        .unwrap();
    assert!(failure["point"].as_f64().unwrap() >= 0.85);
    assert_eq!(recs.iter().filter(|r| r["record"] == "trial").count(), 500);
}

#[test]
fn refuses_to_overwrite_without_force() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.jsonl");
    fs::write(&out, "keep").unwrap();
    let args = ["cover-profile", "--truncation", "64", "--out", path_str(&out)];
    assert_eq!(tvlab(&args).status.code(), Some(2));
    assert_eq!(fs::read_to_string(&out).unwrap(), "keep");
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(tvlab(&forced).status.code(), Some(0));
    assert!(fs::read_to_string(&out).unwrap().starts_with("{\"record\":\"header\""));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "experiment = uc-fails\nbogus = 3\n").unwrap();
    let o = tvlab(&["uc-fails", "--config", path_str(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
    // key not read by this experiment
    assert_eq!(tvlab(&["majority-learner", "--eps", "0.1"]).status.code(), Some(2));
    // violated precondition is named
    let o = tvlab(&["confident-fail", "--n", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("even"));
    assert_eq!(tvlab(&["wtv-exact", "--rho", "0.1"]).status.code(), Some(2));
    assert_eq!(tvlab(&["no-such-experiment"]).status.code(), Some(2));
    assert_eq!(tvlab(&["majority-learner", "--trials", "many"]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_1() {
    // one example per trial at rho = 0.45: the majority constant matches the
    // target coordinate only 55% of the time
    let o = tvlab(&[
        "majority-learner", "--rho", "0.45", "--sample_size", "1", "--trials", "400",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL success rate"));
}

#[test]
fn config_file_env_seed_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("uc.cfg");
    fs::write(&cfg, "# small\nexperiment = uc-fails\nn = 500\nsample_sizes = 5, 50\ntrials = 3\n").unwrap();
    let run = |extra: &[&str], seed_env: Option<&str>| {
        let out = dir.path().join("uc.jsonl");
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_tvlab"));
        cmd.args(["uc-fails", "--config", path_str(&cfg), "--force", "--out", path_str(&out)])
            .args(extra)
            .env_remove("TVLAB_SEED");
        if let Some(s) = seed_env {
            cmd.env("TVLAB_SEED", s);
        }
        assert_eq!(cmd.output().unwrap().status.code(), Some(0));
        records(&out)[0]["config"].clone()
    };
    let header = run(&[], Some("99"));
    assert_eq!(header["seed"], 99);
    assert_eq!(header["n"], 500);
    assert_eq!(header["sample_sizes"], serde_json::json!([5, 50]));
    assert_eq!(header["k"], Value::Null);
    assert_eq!(run(&["--seed", "5", "--trials", "2"], Some("99"))["seed"], 5);
    assert_ne!(run(&[], None)["seed"], 99);
}

#[test]
fn csv_alongside_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.jsonl");
    let o = tvlab(&["cover-profile", "--truncation", "32", "--csv", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("c.jsonl.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("record,name,trial,field,value,reference,tags"));
    assert!(csv.contains("header,cover-profile,,truncation,32,,"));
    assert!(csv.contains("quantity,canonical_size,,value,"));
    let stdout = tvlab(&["cover-profile", "--truncation", "32", "--csv"]).stdout;
    assert_eq!(String::from_utf8(stdout).unwrap(), csv);
}

#[test]
fn help_documents_seed_variable() {
    let o = tvlab(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("TVLAB_SEED"));
    for name in ["verify-distances", "wtv-adversary", "pac-to-wtv"] {
        assert!(text.contains(name));
    }
}
