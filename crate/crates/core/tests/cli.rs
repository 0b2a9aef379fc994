use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mmslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmslab"))
        .args(args)
        .env("MMSLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = path(dir, name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn sharpness_norm_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (space, measure) = (
        path(dir.path(), "space.json"),
        path(dir.path(), "measure.json"),
    );
    let out = mmslab(&[
        "gen",
        "sharpness",
        "--dim",
        "1",
        "--clusters",
        "3",
        "-o",
        &format!("{space},{measure}"),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = mmslab(&[
        "norm",
        "--space",
        &space,
        "--measure",
        &measure,
        "--radius",
        "1",
        "--ball",
        "closed",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let norm = v["norm"].as_f64().unwrap();
    assert!(norm > 2.0 * 3.0 / 4.0 && norm <= 2.0, "{norm}");
    assert_eq!(v["M"], 2);
    assert_eq!(v["exactM"], true);
    assert_eq!(v["certified"], true);
}

#[test]
fn scan_writes_csv_rows_for_both_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(
        dir.path(),
        "s.json",
        r#"{"points": [[0], [1], [2]], "norm": "l2"}"#,
    );
    let measure = write(dir.path(), "m.json", r#"{"weights": [1, 1, 1]}"#);
    let out = mmslab(&[
        "scan",
        "--space",
        &space,
        "--measure",
        &measure,
        "--radii",
        "1,2",
        "--ball",
        "both",
        "--p",
        "2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("radius,l1_norm,max_a_s,M,C,kind"));
    assert_eq!(lines.count(), 4);

    let out = mmslab(&[
        "scan",
        "--space",
        &space,
        "--measure",
        &measure,
        "--radii",
        "1",
        "--format",
        "json",
    ]);
    let rows: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows[0]["l1_norm"].as_f64().unwrap(), 4.0 / 3.0);
}

#[test]
fn converge_reaches_zero() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(
        dir.path(),
        "s.json",
        r#"{"points": [[0], [1], [2]], "norm": "l2"}"#,
    );
    let measure = write(dir.path(), "m.json", r#"{"weights": [1, 1, 1]}"#);
    let out = mmslab(&[
        "converge",
        "--space",
        &space,
        "--measure",
        &measure,
        "--f",
        "threshold:0:0.5",
        "--dyadic",
        "3",
        "--format",
        "json",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.last().unwrap()["error"].as_f64().unwrap(), 0.0);
}

#[test]
fn nets_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(
        dir.path(),
        "s.json",
        r#"{"points": [[0], [1], [2]], "norm": "l2"}"#,
    );
    let report = path(dir.path(), "nets.json");
    let out = mmslab(&[
        "nets", "--space", &space, "--ball", "closed", "--report", &report,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["net"]["cardinality"], 2);
    assert!(v["doubling"]["upper_bound"].as_u64().unwrap() >= 2);
}

#[test]
fn sample_generation_is_reproducible() {
    let a = mmslab(&[
        "gen", "sample", "--kind", "gaussian", "--dim", "2", "--size", "20", "--seed", "5",
    ]);
    let b = mmslab(&[
        "gen", "sample", "--kind", "gaussian", "--dim", "2", "--size", "20", "--seed", "5",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["space"]["points"].as_array().unwrap().len(), 20);
}

#[test]
fn verify_quick_selection_passes() {
    let out = mmslab(&["verify", "--quick", "--select", "duality,sharpness"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_and_format_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"distance_matrix": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}"#,
    );
    let measure = write(dir.path(), "m.json", r#"{"weights": [1, 1, 1]}"#);
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "norm",
            "--space",
            &bad,
            "--measure",
            &measure,
            "--radius",
            "1",
        ],
        vec![
            "scan",
            "--space",
            &bad,
            "--measure",
            &measure,
            "--radii",
            "x",
        ],
        vec!["verify", "--select", "nonsense"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let out = mmslab(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
