use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bidisc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bidisc"))
}

fn run(args: &[&str]) -> Output {
    bidisc().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn fixtures() -> (tempfile::TempDir, PathBuf) {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("fx");
    let out = run(&["fixtures", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    (tmp, dir)
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn certify_numerical_radius_one_pair() {
    let (_t, dir) = fixtures();
    let out = run(&["certify", &path(&dir, "numerical_radius_one_pair.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["certificate"]["verdict"], "Pass");
    assert_eq!(v["config"]["tol"], 1e-9);
}

#[test]
fn certify_rejects_large_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("big.json");
    let m = r#"{"rows":1,"cols":1,"data":[[3.0,0.0]]}"#;
    std::fs::write(&file, format!(r#"{{"S":{m},"P":{{"rows":1,"cols":1,"data":[[0.5,0.0]]}}}}"#)).unwrap();
    let out = run(&["certify", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["result"]["certificate"]["verdict"], "Fail");
}

#[test]
fn classify_quadratic() {
    let (_t, dir) = fixtures();
    let out = run(&["classify-poly", &path(&dir, "quadratic_4z2_minus_z1sq.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["verdict"]["tag"], "GammaDistinguished");
}

#[test]
fn classify_poly_from_stdin() {
    // z1 - 3 has no zeros in Γ.
    let poly = r#"{"deg":[1,0],"coeffs":[[[-3.0,0.0]],[[1.0,0.0]]]}"#;
    let mut child = bidisc()
        .args(["classify-poly", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(poly.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_ne!(json(&out)["result"]["verdict"]["tag"], "GammaDistinguished");
}

#[test]
fn classify_points() {
    let out = run(&["classify-point", "(1,0)"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["class"]["tag"], "OtherBoundary");
    let out = run(&["classify-point", "(2,1)"]);
    assert_eq!(json(&out)["result"]["class"]["tag"], "DistinguishedBoundary");
    let out = run(&["classify-point", "(0.5i,0)"]);
    assert_eq!(json(&out)["result"]["class"]["tag"], "InteriorG2");
}

#[test]
fn fundamental_of_scalar_family() {
    let (_t, dir) = fixtures();
    let out = run(&["fundamental", &path(&dir, "scalar_family_r0.50.json")]);
    assert_eq!(out.status.code(), Some(0));
    let a = &json(&out)["result"]["solve"]["A"];
    let expected = 2.0 * 0.5 / (1.0 + 0.25);
    for (k, entry) in a["data"].as_array().unwrap().iter().enumerate() {
        let re = entry[0].as_f64().unwrap();
        let want = if k % 4 == 0 { expected } else { 0.0 };
        assert!((re - want).abs() < 1e-12);
    }
}

#[test]
fn dilate_checks_every_monomial() {
    let (_t, dir) = fixtures();
    let out = run(&["--truncation", "3", "dilate", &path(&dir, "scalar_family_r0.25.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["certificate"]["checks"].as_array().unwrap().len(), 10);
    assert_eq!(v["result"]["dilation"]["n"], 3);
    assert_eq!(v["result"]["dilation"]["T"]["rows"], 3 + 3 * 3);
}

#[test]
fn decompose_diagonal_unitary() {
    let tmp = tempfile::tempdir().unwrap();
    // Points π(1, i) and π(1, 1) with factors λ + λ̄z2 - z1, λ = (1 + i)/2,
    // and 4z2 - z1²; each factor vanishes at one point only.
    let pair = r#"{"S":{"rows":2,"cols":2,"data":[[1.0,1.0],[0.0,0.0],[0.0,0.0],[2.0,0.0]]},
                   "P":{"rows":2,"cols":2,"data":[[0.0,1.0],[0.0,0.0],[0.0,0.0],[1.0,0.0]]}}"#;
    let f1 = r#"{"deg":[1,1],"coeffs":[[[0.5,0.5],[0.5,-0.5]],[[-1.0,0.0],[0.0,0.0]]]}"#;
    let f2 = r#"{"deg":[2,1],"coeffs":[[[0.0,0.0],[4.0,0.0]],[[0.0,0.0],[0.0,0.0]],[[-1.0,0.0],[0.0,0.0]]]}"#;
    let write = |name: &str, text: &str| {
        let p = tmp.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let (pp, p1, p2) = (write("u.json", pair), write("f1.json", f1), write("f2.json", f2));
    let out = run(&["decompose", &pp, "--factor", &p1, "--factor", &p2]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let parts = v["result"]["parts"].as_array().unwrap();
    assert_eq!(parts.len(), 2);
    assert!(v["result"]["completeness_defect"].as_f64().unwrap() < 1e-8);

    // A single wrong factor does not annihilate the pair.
    let out = run(&["decompose", &pp, "--factor", &p2]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["error"].is_string());
}

#[test]
fn decompose_banded_model() {
    let tmp = tempfile::tempdir().unwrap();
    let sym = tmp.path().join("sym.json");
    std::fs::write(
        &sym,
        r#"{"C0":{"rows":1,"cols":1,"data":[[0.3,0.0]]},"C1":{"rows":1,"cols":1,"data":[[0.3,0.0]]}}"#,
    )
    .unwrap();
    let f = tmp.path().join("f.json");
    // 0.3 + 0.3 z2 - z1.
    std::fs::write(&f, r#"{"deg":[1,1],"coeffs":[[[0.3,0.0],[0.3,0.0]],[[-1.0,0.0],[0.0,0.0]]]}"#).unwrap();
    let out = run(&[
        "decompose",
        "--symbol",
        sym.to_str().unwrap(),
        "--factor",
        f.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["result"]["band_truncated"], true);
}

#[test]
fn input_errors_exit_three() {
    assert_eq!(run(&["certify", "/definitely/missing.json"]).status.code(), Some(3));
    assert_eq!(run(&["classify-point", "(1,2,3)"]).status.code(), Some(3));
    assert_eq!(run(&["--tol", "-1", "classify-point", "(0,0)"]).status.code(), Some(3));
    assert_eq!(
        run(&["--truncation", "2", "--probe-degree", "2", "classify-point", "(0,0)"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn identical_config_gives_identical_bytes() {
    let (_t, dir) = fixtures();
    let quad = path(&dir, "quadratic_4z2_minus_z1sq.json");
    let pair = path(&dir, "scalar_family_r0.75.json");
    for args in [
        vec!["--seed", "7", "classify-poly", quad.as_str()],
        vec!["--truncation", "4", "dilate", pair.as_str()],
        vec!["certify", pair.as_str()],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn out_flag_writes_report() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("report.json");
    let out = run(&["--out", file.to_str().unwrap(), "classify-point", "(0,0)"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(v["config"]["output_path"], file.to_str().unwrap());
    assert_eq!(v["result"]["class"]["tag"], "InteriorG2");
}
