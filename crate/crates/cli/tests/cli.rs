use std::path::Path;
use std::process::{Command, Output};

fn canonsys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_canonsys"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn missing_potential_is_a_usage_error() {
    let o = canonsys(&[
        "discriminant",
        "--lambda-min",
        "0",
        "--lambda-max",
        "1",
        "--samples",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn free_discriminant_alternates() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "zero.json", "{}");
    let text = stdout(&canonsys(&[
        "discriminant",
        "--potential",
        &p,
        "--lambda-min",
        "0",
        "--lambda-max",
        "4",
        "--samples",
        "5",
    ]));
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(
        lines.next().unwrap(),
        "lambda,delta,y11,y12,y21,y22,stability"
    );
    let deltas: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(deltas.len(), 5);
    for (d, expect) in deltas.iter().zip([2.0, -2.0, 2.0, -2.0, 2.0]) {
        assert!((d - expect).abs() < 1e-9, "{d}");
    }
}

#[test]
fn derivative_column_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "q.json",
        r#"{"q": {"kind": "constant", "value": 1.0}}"#,
    );
    let text = stdout(&canonsys(&[
        "discriminant",
        "--potential",
        &p,
        "--lambda-min",
        "-1",
        "--lambda-max",
        "1",
        "--samples",
        "3",
        "--derivative",
    ]));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(
        rows[0],
        "lambda,delta,delta_prime,y11,y12,y21,y22,stability"
    );
    let mid: Vec<&str> = rows[2].split(',').collect();
    let delta: f64 = mid[1].parse().unwrap();
    assert!((delta - 2.0 * std::f64::consts::PI.cosh()).abs() < 1e-8);
    assert_eq!(mid[7], "unstable");
}

#[test]
fn scalar_identity_bands_have_no_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "p.json",
        r#"{"q1": {"kind": "trigpoly", "a0": 0.5, "cos": [1.0]}, "q2": {"kind": "trigpoly", "a0": 0.5, "cos": [1.0]}}"#,
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&canonsys(&[
        "bands",
        "--potential",
        &p,
        "--k-min",
        "-2",
        "--k-max",
        "2",
    ])))
    .unwrap();
    assert_eq!(v["interlacing_ok"], true);
    assert!(v["shift_extrema"].is_null());
    let gaps = v["gaps"].as_array().unwrap();
    assert!(!gaps.is_empty());
    for g in gaps {
        assert!(g["width"].as_f64().unwrap() <= 1e-6);
    }
    assert_eq!(v["config"]["potential"]["q1"]["cos"][0], 1.0);
}

#[test]
fn eigs_and_shift_scan() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "q.json",
        r#"{"q": {"kind": "constant", "value": 1.0}}"#,
    );
    let text = stdout(&canonsys(&[
        "eigs",
        "--potential",
        &p,
        "--kind",
        "nu",
        "--n-min",
        "-1",
        "--n-max",
        "1",
    ]));
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("0,nu,"));
    let nu0: f64 = rows[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!(nu0.abs() < 1e-8);

    let text = stdout(&canonsys(&[
        "shift-scan",
        "--potential",
        &p,
        "--n",
        "0",
        "--tau-samples",
        "4",
    ]));
    assert_eq!(text.lines().nth(1).unwrap(), "tau,mu_n_tau");
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn domain_errors_exit_one_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "sampled.json",
        r#"{"q1": {"kind": "samples", "values": [0.0, 1.0, 0.0]}}"#,
    );
    let o = canonsys(&["asym-check", "--potential", &p, "--lambdas", "25,50"]);
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "NotCanonicalForm");

    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"q3": {"kind": "constant", "value": 1.0}}"#,
    );
    let o = canonsys(&[
        "eigs",
        "--potential",
        &bad,
        "--kind",
        "mu",
        "--n-min",
        "0",
        "--n-max",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn asym_check_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "m.json",
        r#"{"q1": {"kind": "constant", "value": 1.0}, "q2": {"kind": "constant", "value": -1.0}}"#,
    );
    let summary = dir.path().join("summary.json");
    let text = stdout(&canonsys(&[
        "asym-check",
        "--potential",
        &p,
        "--lambdas",
        "25,50,100",
        "--summary",
        summary.to_str().unwrap(),
    ]));
    assert_eq!(text.lines().count(), 5);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(summary).unwrap()).unwrap();
    assert!(v["slope_full"].as_f64().unwrap() <= -1.7);
    assert_eq!(v["full_ok"], true);
}

#[test]
fn inverse_check_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let off = write(
        dir.path(),
        "off.json",
        r#"{"q": {"kind": "constant", "value": 1.0}}"#,
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&canonsys(&[
        "inverse-check",
        "--potential",
        &off,
        "--n-gaps",
        "3",
    ])))
    .unwrap();
    assert_eq!(v["verdict"]["verdict"], "CertifiedNotScalarIdentity");
    assert!(v["max_width"].as_f64().unwrap() > 1.0);

    let scalar = write(
        dir.path(),
        "s.json",
        r#"{"q1": {"kind": "constant", "value": 0.7}, "q2": {"kind": "constant", "value": 0.7}}"#,
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&canonsys(&[
        "inverse-check",
        "--potential",
        &scalar,
        "--n-gaps",
        "3",
    ])))
    .unwrap();
    assert_eq!(v["verdict"]["verdict"], "ConsistentWithScalarIdentityUpToN");
    assert!(!v["oracle_residuals"].as_array().unwrap().is_empty());
}

#[test]
fn output_is_deterministic_and_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "r.json",
        r#"{"q1": {"kind": "trigpoly", "a0": 0.1, "cos": [0.3], "sin": [-0.2]}, "q": {"kind": "trigpoly", "sin": [0.4]}}"#,
    );
    let args = [
        "bands",
        "--potential",
        &p,
        "--k-min",
        "-1",
        "--k-max",
        "1",
        "--tau-samples",
        "8",
    ];
    let a = stdout(&canonsys(&args));
    let b = stdout(&canonsys(&[&args[..], &["--threads", "1"]].concat()));
    assert_eq!(a, b);
    let out = dir.path().join("bands.json");
    stdout(&canonsys(
        &[&args[..], &["--output", out.to_str().unwrap()]].concat(),
    ));
    assert_eq!(std::fs::read_to_string(out).unwrap(), a);
}
