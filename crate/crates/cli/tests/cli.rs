use std::path::Path;
use std::process::{Command, Output};

fn trt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trt"))
        .args(args)
        .env("TRT_THREADS", "1")
        .output()
        .expect("spawn trt")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ok(o: &Output) {
    assert!(
        o.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn phantom_simulate_reconstruct_compare() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.ttf");
    let d = dir.path().join("d.ttd");
    let r = dir.path().join("r.ttf");
    let rep = dir.path().join("rep.json");
    ok(&trt(&["phantom", "--kind", "smooth", "--n", "16", "--extent", "1", "--out", s(&p)]));
    ok(&trt(&["simulate", "--field", s(&p), "--angles", "8", "--out", s(&d)]));
    ok(&trt(&["reconstruct", "--data", s(&d), "--out", s(&r)]));
    ok(&trt(&["compare", "--a", s(&r), "--b", s(&p), "--report", s(&rep)]));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&rep).unwrap()).unwrap();
    assert_eq!(json["components"].as_array().unwrap().len(), 6);
    assert!(json["aggregate_relative_l2"].as_f64().unwrap().is_finite());
}

#[test]
fn compare_with_itself_reports_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.ttf");
    let rep = dir.path().join("rep.json");
    ok(&trt(&["phantom", "--kind", "sharp", "--n", "8", "--out", s(&p)]));
    let o = trt(&["compare", "--a", s(&p), "--b", s(&p), "--report", s(&rep)]);
    ok(&o);
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&rep).unwrap()).unwrap();
    assert_eq!(json["aggregate_relative_l2"].as_f64(), Some(0.0));
    assert_eq!(json["max_abs_difference"].as_f64(), Some(0.0));
    for c in json["components"].as_array().unwrap() {
        assert_eq!(c["relative_l2"].as_f64(), Some(0.0));
    }
}

#[test]
fn two_axis_mode_on_three_axis_data_warns() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.ttf");
    let d = dir.path().join("d.ttd");
    let r = dir.path().join("r.ttf");
    let u = dir.path().join("u.ttf");
    ok(&trt(&["phantom", "--kind", "potential", "--n", "16", "--out", s(&p)]));
    ok(&trt(&["simulate", "--field", s(&p), "--angles", "8", "--out", s(&d)]));
    let o = trt(&[
        "reconstruct", "--data", s(&d), "--mode", "two-axis-potential", "--out", s(&r), "--u-out", s(&u),
    ]);
    ok(&o);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("only the e1 and e2"), "{err}");
    assert!(u.exists() && r.exists());
}

#[test]
fn diagonals_alt_and_binned_noisy_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.ttf");
    let d = dir.path().join("d.ttd");
    let r = dir.path().join("r.ttf");
    ok(&trt(&["phantom", "--kind", "smooth", "--n", "24", "--out", s(&p)]));
    ok(&trt(&[
        "simulate", "--field", s(&p), "--angles", "6", "--noise", "1", "--bin", "3", "--seed", "4", "--out", s(&d),
    ]));
    let o = trt(&["reconstruct", "--data", s(&d), "--mode", "diagonals-alt", "--out", s(&r)]);
    ok(&o);
    assert!(String::from_utf8_lossy(&o.stderr).contains("consistency residual"));
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.ttf");
    let (d1, d2) = (dir.path().join("a.ttd"), dir.path().join("b.ttd"));
    ok(&trt(&["phantom", "--kind", "null2", "--n", "12", "--out", s(&p)]));
    for d in [&d1, &d2] {
        ok(&trt(&["simulate", "--field", s(&p), "--angles", "5", "--noise", "2", "--seed", "9", "--out", s(d)]));
    }
    assert_eq!(std::fs::read(&d1).unwrap(), std::fs::read(&d2).unwrap());
}

#[test]
fn export_slice_pgm_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.ttf");
    let pgm = dir.path().join("s.pgm");
    let csv = dir.path().join("s.csv");
    ok(&trt(&["phantom", "--kind", "smooth", "--n", "8", "--out", s(&p)]));
    ok(&trt(&[
        "export-slice", "--field", s(&p), "--component", "3", "--axis", "e3", "--index", "4", "--window-min", "-1",
        "--window-max", "1", "--out", s(&pgm),
    ]));
    let bytes = std::fs::read(&pgm).unwrap();
    assert!(bytes.starts_with(b"P5\n8 8\n255\n"));
    assert_eq!(bytes.len(), 11 + 64);
    ok(&trt(&[
        "export-slice", "--field", s(&p), "--axis", "e1", "--index", "0", "--format", "csv", "--out", s(&csv),
    ]));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().all(|l| l.split(',').all(|v| v.parse::<f64>().is_ok())));
}

#[test]
fn failures_exit_nonzero_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.ttf");
    ok(&trt(&["phantom", "--kind", "smooth", "--n", "8", "--out", s(&p)]));
    let o = trt(&[
        "export-slice", "--field", s(&p), "--axis", "e3", "--index", "0", "--window-min", "2", "--window-max", "1",
        "--out", s(&dir.path().join("x.pgm")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.starts_with("error:"));

    let o = trt(&["reconstruct", "--data", s(&dir.path().join("missing.ttd")), "--out", s(&p)]);
    assert_eq!(o.status.code(), Some(1));

    let bad = dir.path().join("bad.ttf");
    std::fs::write(&bad, b"NOPE0000").unwrap();
    let o = trt(&["compare", "--a", s(&bad), "--b", s(&p)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NOPE"));
}

#[test]
fn usage_errors_exit_two_and_help_everywhere() {
    assert_eq!(trt(&["phantom", "--bogus"]).status.code(), Some(2));
    assert_eq!(trt(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(trt(&["phantom", "--kind", "round", "--n", "4", "--out", "x"]).status.code(), Some(2));
    for sub in ["phantom", "simulate", "reconstruct", "compare", "export-slice"] {
        let o = trt(&[sub, "--help"]);
        ok(&o);
        assert!(String::from_utf8_lossy(&o.stdout).contains("Usage"));
    }
}
