use std::fs;
use std::path::Path;

use areaflow_cli::{main_with_args, RunManifest, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn call(dir: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["areaflow", "--out", dir.to_str().unwrap()];
    argv.extend_from_slice(args);
    main_with_args(argv)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const TORUS: &str = r#"
dims = [2, 2]
grid = 16
t_end = 0.1
sample_dt = 0.02

[initial]
preset = "linear_sine"
amplitude = 0.1
"#;

#[test]
fn equal_spheres_hold_a_strictly() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        call(
            dir.path(),
            &[
                "audit",
                "--m",
                "sphere:3:1",
                "--n",
                "sphere:3:1",
                "--conditions",
                "A"
            ]
        ),
        EXIT_OK
    );
    let r = read_json(&dir.path().join("audit_A.json"));
    assert_eq!(r["holds"], true);
    assert_eq!(r["strict"], true);
    assert_eq!(r["slacks"][1]["value"], 2.0);
}

#[test]
fn hopf_fails_both_conditions_without_failing_the_command() {
    let dir = tempfile::tempdir().unwrap();
    let code = call(
        dir.path(),
        &[
            "audit",
            "--m",
            "sphere:3:1",
            "--n",
            "fubini:2:4",
            "--conditions",
            "A,B",
        ],
    );
    assert_eq!(code, EXIT_OK);
    let a = read_json(&dir.path().join("audit_A.json"));
    let b = read_json(&dir.path().join("audit_B.json"));
    assert_eq!(
        (a["holds"].clone(), b["holds"].clone()),
        (Value::Bool(false), Value::Bool(false))
    );
    assert_eq!(a["slacks"][0]["value"], -1.0);
    assert_eq!(b["slacks"][1]["value"], -1.0);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(call(dir.path(), &["audit", "--frobnicate"]), EXIT_USAGE);
    assert_eq!(
        call(
            dir.path(),
            &["audit", "--m", "blob:3:1", "--n", "sphere:3:1"]
        ),
        EXIT_USAGE
    );
    assert_eq!(
        call(dir.path(), &["verify-identities", "--suites", "nope"]),
        EXIT_USAGE
    );
    assert_eq!(
        call(
            dir.path(),
            &["flow", "--case", "torus", "--config", "/nonexistent.toml"]
        ),
        EXIT_USAGE
    );
}

#[test]
fn identity_sweep_passes_and_records_c0() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        call(
            dir.path(),
            &["verify-identities", "--sweep", "2000", "--seed", "7"]
        ),
        EXIT_OK
    );
    let summaries = read_json(&dir.path().join("identities.json"));
    for s in summaries.as_array().unwrap() {
        assert!(s["min_gap"].as_f64().unwrap() >= -1e-10, "{s}");
    }
    let m = read_json(&dir.path().join("verify-identities.manifest.json"));
    assert_eq!(m["constants"]["c0"], 8.0);
    assert_eq!(m["seeds"][0], 7);
}

#[test]
fn flow_outputs_are_byte_identical_on_rerun() {
    let cfg_dir = tempfile::tempdir().unwrap();
    let cfg = cfg_dir.path().join("torus.toml");
    fs::write(&cfg, TORUS).unwrap();
    let runs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for d in &runs {
        assert_eq!(
            call(
                d.path(),
                &["flow", "--case", "torus", "--config", cfg.to_str().unwrap()]
            ),
            EXIT_OK
        );
    }
    for name in ["flow.csv", "flow.json", "flow.manifest.json"] {
        let a = fs::read(runs[0].path().join(name)).unwrap();
        let b = fs::read(runs[1].path().join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let csv = fs::read_to_string(runs[0].path().join("flow.csv")).unwrap();
    assert!(csv.starts_with("t,m_of_t,lambda_max,max_product,residual,scaleM,scaleN\n"));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn failed_monotonicity_exits_one() {
    let cfg_dir = tempfile::tempdir().unwrap();
    let cfg = cfg_dir.path().join("torus.toml");
    fs::write(&cfg, format!("growth_rate = -500.0\n{TORUS}")).unwrap();
    let out = tempfile::tempdir().unwrap();
    assert_eq!(
        call(
            out.path(),
            &["flow", "--case", "torus", "--config", cfg.to_str().unwrap()]
        ),
        EXIT_FAILED
    );
    let m = read_json(&out.path().join("flow.manifest.json"));
    assert_eq!(m["checks"]["monotone"], false);
    assert_eq!(m["passed"], false);
    assert_eq!(call(out.path(), &["report"]), EXIT_FAILED);
}

#[test]
fn case_mismatch_is_a_usage_error() {
    let cfg_dir = tempfile::tempdir().unwrap();
    let cfg = cfg_dir.path().join("torus.toml");
    fs::write(&cfg, format!("case = \"torus\"\n{TORUS}")).unwrap();
    let out = tempfile::tempdir().unwrap();
    assert_eq!(
        call(
            out.path(),
            &[
                "flow",
                "--case",
                "equivariant",
                "--config",
                cfg.to_str().unwrap()
            ]
        ),
        EXIT_USAGE
    );
    assert_eq!(
        call(
            out.path(),
            &["flow", "--case", "torus", "--config", cfg.to_str().unwrap()]
        ),
        EXIT_OK
    );
}

#[test]
fn manifest_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        call(
            dir.path(),
            &["pic1", "--space", "sphere:4:1", "--starts", "8"]
        ),
        EXIT_OK
    );
    let text = fs::read_to_string(dir.path().join("pic1.manifest.json")).unwrap();
    let m: RunManifest = serde_json::from_str(&text).unwrap();
    assert_eq!(areaflow_cli::to_json(&m), text);
    assert!((m.constants["chi_ic1"] - 1.0).abs() < 1e-3);
    assert!(dir.path().join("pic1.timing.json").exists());
}

#[test]
fn report_needs_manifests() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(call(dir.path(), &["report"]), EXIT_FAILED);
}
