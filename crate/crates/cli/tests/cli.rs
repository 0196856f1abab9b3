use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylconn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    });
    (out.status.code().unwrap(), v)
}

fn section<'a>(v: &'a Value, name: &str) -> &'a Value {
    v["sections"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == name)
        .unwrap_or_else(|| panic!("no section {name}"))
}

fn check<'a>(sec: &'a Value, name: &str) -> &'a Value {
    sec["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_klein_passes() {
    let (code, v) = json(&["verify", "--scenario", "rw-klein"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "pass");
    assert!(section(&v, "verify")["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["status"] == "pass"));
}

#[test]
fn verify_cylinder_marks_expected_failure() {
    let (code, v) = json(&["verify", "--scenario", "deg-cylinder"]);
    assert_eq!(code, 0);
    let sec = section(&v, "verify");
    assert_eq!(
        check(sec, "metric-deck-invariance")["status"],
        "expected-fail"
    );
    assert_eq!(check(sec, "connection-deck-equivariance")["status"], "pass");
}

#[test]
fn classify_reports_periods_and_scales() {
    let (code, v) = json(&["classify", "--scenario", "rw-klein", "--param", "q=3"]);
    assert_eq!(code, 0);
    let sec = section(&v, "classify");
    assert_eq!(sec["data"]["verdict"], "LocallyMetricOnly");
    let per: Vec<f64> = serde_json::from_value(sec["data"]["periods"].clone()).unwrap();
    assert!((per[0] + 1.0).abs() < 1e-8 && (per[1] + 6.0).abs() < 1e-8 && per[2].abs() < 1e-8);
    let scales: Vec<f64> = serde_json::from_value(sec["data"]["scales"].clone()).unwrap();
    assert!((scales[1] - 6.0f64.exp()).abs() / 6.0f64.exp() < 1e-6);
    assert_eq!(
        sec["checks"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|c| c["name"].as_str().unwrap().starts_with("cocycle"))
            .count(),
        9
    );

    let (_, v) = json(&[
        "classify",
        "--scenario",
        "rw-klein",
        "--param",
        "a=0",
        "--param",
        "b=0",
    ]);
    assert_eq!(section(&v, "classify")["data"]["verdict"], "GloballyMetric");
}

#[test]
fn classify_without_psi_is_an_input_error() {
    let out = run(&["classify", "--scenario", "deg-cylinder"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no (h, psi) pair"), "{err}");
}

#[test]
fn transport_cylinder_flags_causal_ambiguity() {
    let (code, v) = json(&[
        "transport",
        "--scenario",
        "deg-cylinder",
        "--loop",
        "gen:0",
        "--object",
        "metric",
    ]);
    assert_eq!(code, 0);
    let sec = section(&v, "transport");
    assert_eq!(sec["data"]["causal_structure_ambiguous"], true);
    assert_eq!(check(sec, "golden-sign-flip")["status"], "pass");
    let text = String::from_utf8(
        run(&["transport", "--scenario", "deg-cylinder", "--loop", "gen:0"]).stdout,
    )
    .unwrap();
    assert!(text.contains("causal structure ambiguous"));
}

#[test]
fn transport_word_and_vector() {
    let (code, v) = json(&[
        "transport",
        "--scenario",
        "rw-klein",
        "--loop",
        "word:0,1",
        "--object",
        "vector:0,1,0,0",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        check(section(&v, "transport"), "norm-law")["status"],
        "pass"
    );
}

#[test]
fn christoffel_slice_and_flat() {
    let (code, v) = json(&[
        "christoffel",
        "--scenario",
        "rw-klein",
        "--point",
        "0.3,-0.2,0.5",
        "--slice",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        section(&v, "christoffel-slice")["data"]["symbols"]
            .as_array()
            .unwrap()
            .len(),
        10
    );

    let dir = tempfile::tempdir().unwrap();
    let flat = write(
        dir.path(),
        "flat.json",
        r#"{"dimension": 2, "coordinates": ["x", "y"], "metric": [["1", "0"], ["1"]],
            "signature": {"negative": 0, "positive": 2}, "basepoint": [0, 0],
            "sample_box": {"lo": [0, 0], "hi": [1, 1]}}"#,
    );
    let (code, v) = json(&["christoffel", "--scenario", &flat, "--point", "0.5,0.5"]);
    assert_eq!(code, 0);
    assert_eq!(v["scenario"], "flat");
    assert_eq!(
        section(&v, "christoffel")["notes"][0],
        "no nonzero Christoffel symbols"
    );
}

#[test]
fn geodesic_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let out = run(&[
        "geodesic",
        "--scenario",
        "rw-klein",
        "--x0",
        "0,0,0,0",
        "--v0",
        "0,0,1,0",
        "--smax",
        "5",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let body = std::fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("s,t,x,y,z,v_t,v_x,v_y,v_z"));
    assert_eq!(lines.count(), 51);
}

#[test]
fn curvature_rescale_check() {
    let (code, v) = json(&[
        "curvature",
        "--scenario",
        "rw-klein",
        "--point",
        "0,0,0,0",
        "--gauge",
        "1",
        "--rescale-check",
    ]);
    assert_eq!(code, 0);
    let sec = section(&v, "curvature");
    for f in ["0.5", "2", "10"] {
        assert_eq!(
            check(sec, &format!("einstein-rescale[{f}]"))["status"],
            "pass"
        );
    }
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec![
            "verify".into(),
            "--scenario".into(),
            "no-such-scenario".into(),
        ],
        vec![
            "verify".into(),
            "--scenario".into(),
            "rw-klein".into(),
            "--param".into(),
            "zz=1".into(),
        ],
        vec![
            "christoffel".into(),
            "--scenario".into(),
            "rw-klein".into(),
            "--point".into(),
            "0,0".into(),
        ],
        vec![
            "curvature".into(),
            "--scenario".into(),
            "rw-klein".into(),
            "--point".into(),
            "0,0,0,0".into(),
            "--gauge".into(),
            "-1".into(),
        ],
        vec![
            "transport".into(),
            "--scenario".into(),
            "rw-klein".into(),
            "--loop".into(),
            "gen:7".into(),
        ],
        vec![
            "verify".into(),
            "--scenario".into(),
            write(
                dir.path(),
                "unknown.json",
                r#"{"dimension": 1, "bogus": 2}"#,
            ),
        ],
        vec![
            "verify".into(),
            "--scenario".into(),
            write(
                dir.path(),
                "open.json",
                r#"{"dimension": 2, "coordinates": ["x", "y"], "metric": [["1", "0"], ["1"]], "psi": ["y", "0"],
                    "signature": {"negative": 0, "positive": 2}, "basepoint": [0, 0],
                    "sample_box": {"lo": [0, 0], "hi": [1, 1]}}"#,
            ),
        ],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn preflight_names_check_and_point() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "noninvariant.json",
        r#"{"dimension": 2, "coordinates": ["x", "y"], "metric": [["1+x^2", "0"], ["1"]],
            "signature": {"negative": 0, "positive": 2},
            "generators": [{"matrix": [[1, 0], [0, 1]], "translation": [1, 0]}],
            "basepoint": [0, 0], "sample_box": {"lo": [0, 0], "hi": [1, 1]}}"#,
    );
    let out = run(&["verify", "--scenario", &p]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("metric deck invariance")
            && err.contains("generator 0")
            && err.contains(" at ["),
        "{err}"
    );
}

#[test]
fn report_text_and_out_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.json");
    let out = run(&[
        "report",
        "--scenario",
        "deg-cylinder",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&std::fs::read(&out_path).unwrap()).unwrap();
    let names: Vec<&str> = v["sections"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["verify", "christoffel", "transport", "curvature"]);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("status: PASS"));
}
