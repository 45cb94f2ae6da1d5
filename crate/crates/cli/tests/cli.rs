use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kahlerlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kahlerlab"))
        .args(args)
        .env_remove("KAHLERLAB_JOBS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn list_names_every_scenario() {
    let out = kahlerlab(&["list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for s in kahlerlab_cli::registry::scenarios() {
        assert!(text.contains(&s.scenario), "{} missing", s.scenario);
    }
}

#[test]
fn json_is_byte_identical_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    for scenario in ["thullen-closed-forms", "thullen-soliton-scan", "fd-oracle"] {
        let mut reports = Vec::new();
        for jobs in ["1", "8", "1"] {
            let path = dir.path().join(format!("{scenario}-{jobs}.json"));
            let out = kahlerlab(&[
                "verify",
                "--scenario",
                scenario,
                "--jobs",
                jobs,
                "--out",
                path.to_str().unwrap(),
            ]);
            assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
            reports.push(std::fs::read(&path).unwrap());
        }
        assert!(reports.windows(2).all(|w| w[0] == w[1]), "{scenario}");
    }
}

#[test]
fn jobs_default_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_kahlerlab"))
        .args(["verify", "--scenario", "ball-squeezing"])
        .env("KAHLERLAB_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let bad = Command::new(env!("CARGO_BIN_EXE_kahlerlab"))
        .args(["verify", "--scenario", "ball-squeezing"])
        .env("KAHLERLAB_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn report_shape() {
    let out = kahlerlab(&["verify", "--scenario", "thullen-g1-einstein", "--set", "points.count=7"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["header", "records", "summary"]);
    assert!(v["header"]["timestamp"].is_null());
    assert_eq!(v["header"]["seed"], 3);
    assert_eq!(v["header"]["config"]["points"]["count"], 7);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 7);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r["index"], i);
        assert_eq!(r["pass"], true);
    }
    assert_eq!(v["summary"]["checks"]["einstein"]["passed"], 7);
}

#[test]
fn csv_has_one_row_per_point_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = kahlerlab(&[
        "verify",
        "--scenario",
        "cheng-yau-ball",
        "--set",
        "points.count=12",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = read(&path);
    let mut rows = text.lines();
    assert_eq!(
        rows.next().unwrap(),
        "point_index,z0_re,z0_im,z1_re,z1_im,check,value,tolerance,pass,error"
    );
    assert_eq!(rows.count(), 12 * 3);
}

#[test]
fn empty_point_list_gives_empty_records() {
    let out = kahlerlab(&["verify", "--scenario", "thullen-axis", "--set", "points.points=[]"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["records"], Value::Array(vec![]));
    assert!(v["header"].is_object());
}

#[test]
fn failing_checks_exit_one() {
    let out = kahlerlab(&[
        "verify",
        "--scenario",
        "thullen-g1-einstein",
        "--set",
        "tolerances.einstein=1e-30",
    ]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["summary"]["all_pass"], false);
}

#[test]
fn floor_checks_fail_below_the_floor() {
    let out = kahlerlab(&[
        "verify",
        "--scenario",
        "hartogs-exp-floor",
        "--set",
        "floors.einstein=100",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn module_errors_are_recorded_not_fatal() {
    // z ≠ 0 is inside the domain but off the axis the table describes
    let out = kahlerlab(&[
        "verify",
        "--scenario",
        "thullen-axis",
        "--set",
        "points.points.0.0=[0.1,0.0]",
    ]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["records"][0]["errors"]["axis_table"], "InvalidParams");
    assert_eq!(v["records"][1]["pass"], true);
}

#[test]
fn config_errors_exit_two() {
    for args in [
        &["verify", "--scenario", "no-such-scenario"][..],
        &["verify", "--scenario", "ball-einstein", "--set", "checks=[\"nope\"]"],
        &["verify", "--scenario", "ball-einstein", "--set", "jet_order=1"],
        &[
            "verify",
            "--scenario",
            "ball-einstein",
            "--set",
            "tolerances.einstein=-1",
        ],
        &["verify", "--scenario", "ball-einstein", "--set", "points"],
        &[
            "sweep",
            "--domain",
            "thullen_gm",
            "--param",
            "m=0",
            "--ray",
            "0,1,4,1e-3",
            "--checks",
            "einstein",
        ],
    ] {
        let out = kahlerlab(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("r.json");
    let out = kahlerlab(&[
        "verify",
        "--scenario",
        "ball-squeezing",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    let out = kahlerlab(&["verify", "--config", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn config_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = kahlerlab_cli::registry::scenario("ball-rotation-soliton").unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let from_file = kahlerlab(&["verify", "--config", path.to_str().unwrap()]);
    let from_registry = kahlerlab(&["verify", "--scenario", "ball-rotation-soliton"]);
    assert_eq!(code(&from_file), 0);
    assert_eq!(from_file.stdout, from_registry.stdout);
}

#[test]
fn sweep_runs_along_a_ray() {
    let out = kahlerlab(&[
        "sweep",
        "--domain",
        "thullen_gm",
        "--param",
        "m=1",
        "--ray",
        "0,1,5,1e-3",
        "--checks",
        "metric,einstein",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 5);
}

#[test]
fn norms_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.txt");
    let out = kahlerlab(&["norms", "--m", "2", "--cap", "6", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let table = kahlerlab_core::oracle::MonomialNormTable::read_from(&path).unwrap();
    assert_eq!(table.m(), 2);
    assert_eq!(table.cap(), 6);
}
