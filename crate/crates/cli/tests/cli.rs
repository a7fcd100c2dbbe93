//! Exit-code contract and golden outputs of the `photonsphere` binary.
//! Regenerate the golden files with `UPDATE_GOLDEN=1 cargo test --test cli`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use photonsphere::profile::geometric_nodes;
use photonsphere::{ProfileSpec, RadialProfile};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_photonsphere")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

fn write_json(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_vec(v).unwrap()).unwrap();
    p
}

/// Schwarzschild m = 1 on [3, 100] sampled at 400 nodes, lapse scaled by `1 + eps·sin r`.
fn table(eps: f64) -> Value {
    let exact = RadialProfile::schwarzschild_exterior(1.0, 3.0, 100.0).unwrap();
    let mut spec =
        serde_json::to_value(ProfileSpec::sample(&exact, &geometric_nodes(3.0, 100.0, 400)).unwrap()).unwrap();
    let r: Vec<f64> = serde_json::from_value(spec["r"].clone()).unwrap();
    let n: Vec<f64> = serde_json::from_value(spec["N"].clone()).unwrap();
    spec["N"] = n.iter().zip(&r).map(|(n, r)| n * (1.0 + eps * r.sin())).collect();
    spec
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn exit_code_table() {
    let cases: &[(&[&str], i32)] = &[
        (&["verify", "--mass", "1"], 0),
        (&["verify", "--mass", "-1"], 0),
        (&["verify", "--mass", "0", "--samples", "64"], 0),
        (&["verify", "--r-min", "5", "--r-max", "4"], 64),
        (&["verify", "--metric", "interior_fluid", "--mass", "1", "--radius", "2.5"], 1),
        (&["photon-search", "--mass", "1"], 0),
        (&["photon-search", "--mass", "0"], 0),
        (&["photon-search", "--mass", "-1"], 0),
        (&["audit", "--mass", "1"], 0),
        (&["audit", "--mass", "1", "--radius", "2.9"], 1),
        (&["audit", "--mass", "-1"], 2),
        (&["glue", "--mass", "1"], 0),
        (&["glue", "--mass", "1", "--r-min", "2.9"], 2),
        (&["pipeline", "--mass", "1"], 0),
        (&["pipeline", "--mass", "2"], 0),
        (&["pipeline", "--mass", "1", "--r-min", "2.9"], 2),
        (&["pipeline", "--mass", "0"], 2),
        (&["star", "--mass", "1", "--radius", "2.5"], 0),
        (&["star", "--mass", "1", "--radius", "3.5"], 0),
        (&["star", "--mass", "1", "--radius", "2.2"], 65),
        (&["star", "--metric", "schwarzschild"], 64),
        (&["verify", "--tol", "-1"], 64),
        (&["verify", "--samples", "1"], 64),
        (&["verify", "--metric", "tabulated"], 64),
        (&["no-such-command"], 64),
        (&["verify", "--config", "/nonexistent/config.json"], 74),
    ];
    let mut table = String::new();
    for (args, expected) in cases {
        let out = run(args);
        assert_eq!(code(&out), *expected, "{args:?}: {}", stderr(&out));
        table.push_str(&format!("{} => {expected}\n", args.join(" ")));
    }
    golden("exit_codes.txt", &table);
}

#[test]
fn photon_search_prints_ten_decimals() {
    let out = run(&["photon-search", "--mass", "1"]);
    golden("photon_search_m1.txt", &stdout(&out));
    assert_eq!(stdout(&out), "3.0000000000\n");
    assert_eq!(stdout(&run(&["photon-search", "--mass", "2"])), "6.0000000000\n");
    assert!(stdout(&run(&["photon-search", "--mass", "0"])).is_empty());
    assert!(stdout(&run(&["photon-search", "--mass", "-1"])).is_empty());
}

#[test]
fn pipeline_reports_and_refusals() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["pipeline", "--mass", "1", "--out", p(dir.path())]);
    assert_eq!(code(&out), 0);
    golden("pipeline_m1.txt", &stdout(&out));
    let json: Value = serde_json::from_slice(&fs::read(dir.path().join("pipeline.json")).unwrap()).unwrap();
    let rep = &json["report"];
    assert_eq!(rep["verdict"], "schwarzschild_rigid");
    let rec = &rep["reconstructed"];
    assert!((rec["mass"].as_f64().unwrap() - 1.0).abs() <= 1e-10);
    assert!((rec["r_photon"].as_f64().unwrap() - 3.0).abs() <= 1e-10);
    assert!((rec["spacetime_H"].as_f64().unwrap() - 1.0 / 3f64.sqrt()).abs() <= 1e-10);
    assert_eq!(rep["match_reports"].as_array().unwrap().len(), 3);
    assert_eq!(json["settings"]["pipeline"]["adm_schedule"], serde_json::json!([50.0, 100.0, 200.0, 400.0]));
    let csv = fs::read_to_string(dir.path().join("pipeline.csv")).unwrap();
    assert!(csv.starts_with("chart,r,psi,u,scalar_hat,max_curvature\n"));
    assert!(csv.lines().count() > 400);

    let out = run(&["pipeline", "--mass", "2", "--out", p(dir.path())]);
    assert_eq!(code(&out), 0);
    let json: Value = serde_json::from_slice(&fs::read(dir.path().join("pipeline.json")).unwrap()).unwrap();
    assert!((json["report"]["reconstructed"]["mass"].as_f64().unwrap() - 2.0).abs() <= 1e-10);

    let out = run(&["pipeline", "--mass", "1", "--r-min", "2.9", "--out", p(dir.path())]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("res_rH"), "{}", stderr(&out));
    let json: Value = serde_json::from_slice(&fs::read(dir.path().join("pipeline.json")).unwrap()).unwrap();
    assert_eq!(json["error"]["exit_code"], 2);
    assert!(json["error"]["message"].as_str().unwrap().contains("res_rH"));
}

#[test]
fn star_scenarios() {
    let out = run(&["star", "--mass", "1", "--radius", "2.5"]);
    assert_eq!(code(&out), 0);
    golden("star_compact.txt", &stdout(&out));
    assert!(stdout(&out).contains("0.8"));

    let out = run(&["star", "--mass", "1", "--radius", "2.2"]);
    assert_eq!(code(&out), 65);
    assert!(stderr(&out).contains("0.909"), "{}", stderr(&out));

    let out = run(&["star", "--mass", "1", "--radius", "3.5"]);
    assert_eq!(code(&out), 0);
    golden("star_dilute.txt", &stdout(&out));
    assert!(stdout(&out).contains("unmet"));
}

#[test]
fn verify_names_worst_sample_of_noisy_table() {
    let dir = tempfile::tempdir().unwrap();
    let noisy = write_json(dir.path(), "noisy.json", &table(0.01));
    let out = run(&["verify", "--profile", p(&noisy), "--out", p(&dir.path().join("out"))]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("worst sample: r = "), "{}", stdout(&out));
    let json: Value = serde_json::from_slice(&fs::read(dir.path().join("out/verify.json")).unwrap()).unwrap();
    assert_eq!(json["report"]["within_tolerance"], false);
    assert!(json["report"]["max_interpolation_bound"].as_f64().unwrap() > 0.0);
    let csv = fs::read_to_string(dir.path().join("out/verify.csv")).unwrap();
    assert_eq!(csv.lines().count(), 513);
}

#[test]
fn perturbed_table_forced_through_pipeline_is_not_rigid() {
    let dir = tempfile::tempdir().unwrap();
    let pert = write_json(dir.path(), "pert.json", &table(0.01));
    assert_eq!(code(&run(&["pipeline", "--profile", p(&pert)])), 2);
    let cfg = write_json(dir.path(), "relaxed.json", &serde_json::json!({"pipeline": {"relaxed_gates": true}}));
    let out_dir = dir.path().join("out");
    let out = run(&["pipeline", "--profile", p(&pert), "--config", p(&cfg), "--out", p(&out_dir)]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    let json: Value = serde_json::from_slice(&fs::read(out_dir.join("pipeline.json")).unwrap()).unwrap();
    assert_eq!(json["report"]["verdict"], "not_rigid");
    assert!(json["report"]["flatness_max_curvature"].as_f64().unwrap() > 1e-4);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_json(
        dir.path(),
        "cfg.json",
        &serde_json::json!({"metric": {"kind": "schwarzschild", "mass": 2.0, "r_lo": 4.2, "r_hi": 200.0}}),
    );
    assert_eq!(stdout(&run(&["photon-search", "--config", p(&cfg)])), "6.0000000000\n");
    // Flags override file values.
    assert_eq!(
        stdout(&run(&["photon-search", "--config", p(&cfg), "--mass", "1", "--r-min", "2.1"])),
        "3.0000000000\n"
    );

    let unknown = write_json(dir.path(), "unknown.json", &serde_json::json!({"mas": 1.0}));
    let out = run(&["verify", "--config", p(&unknown)]);
    assert_eq!(code(&out), 64);
    assert!(stderr(&out).contains("unknown field"));

    let bad_schedule =
        write_json(dir.path(), "sched.json", &serde_json::json!({"pipeline": {"adm_schedule": [100.0, 50.0, 200.0]}}));
    assert_eq!(code(&run(&["pipeline", "--config", p(&bad_schedule)])), 64);
    let bad_tol = write_json(dir.path(), "tol.json", &serde_json::json!({"pipeline": {"flat_tol": 0.0}}));
    assert_eq!(code(&run(&["pipeline", "--config", p(&bad_tol)])), 64);

    fs::write(dir.path().join("broken.json"), "{").unwrap();
    assert_eq!(code(&run(&["verify", "--config", p(&dir.path().join("broken.json"))])), 64);

    // Output path equal to an input path.
    assert_eq!(code(&run(&["verify", "--config", p(&cfg), "--out", p(&cfg)])), 64);
}

#[test]
fn io_failures_exit_74() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    fs::write(&file, "x").unwrap();
    let out = run(&["verify", "--samples", "16", "--out", p(&file.join("sub"))]);
    assert_eq!(code(&out), 74, "{}", stderr(&out));
    assert_eq!(code(&run(&["verify", "--profile", p(&dir.path().join("missing.json"))])), 74);
}

#[test]
fn invalid_table_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_json(
        dir.path(),
        "bad.json",
        &serde_json::json!({"kind": "tabulated", "r": [1.0, 2.0, 2.0, 3.0], "N": [1, 1, 1, 1], "A": [1, 1, 1, 1], "Rareal": [1, 2, 2, 3]}),
    );
    assert_eq!(code(&run(&["verify", "--profile", p(&bad)])), 64);
}

#[test]
fn emitted_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        assert_eq!(code(&run(&["audit", "--mass", "1", "--out", p(out)])), 0);
    }
    for name in ["audit.json", "audit.csv", "audit_flow.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let json: Value = serde_json::from_slice(&fs::read(a.join("audit.json")).unwrap()).unwrap();
    // Defaults are recorded; the output path is not.
    assert_eq!(json["settings"]["samples"], 256);
    assert!(json["settings"].get("out").is_none());
    assert_eq!(json["report"]["audits"][0]["is_photon_sphere"], true);
}
