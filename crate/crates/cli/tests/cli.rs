use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperconv"))
        .args(args)
        .env_remove("HYPERCONV_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn header_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
}

fn row_at(text: &str, t: f64) -> Vec<f64> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect::<Vec<f64>>())
        .find(|r| (r[0] - t).abs() < 1e-9)
        .expect("row present")
}

#[test]
fn kernel_row_at_two() {
    let o = run(&["kernel", "--model", "naimark", "--x", "1", "--y", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l == "t,k"));
    let r = row_at(&s, 2.0);
    assert!((r[1] - 1.0 / (2.0 * 1f64.sinh())).abs() < 1e-12);
    assert_eq!(header_value(&s, "method"), Some("closed-form"));
}

#[test]
fn kernel_both_with_diff() {
    let o = run(&["kernel", "--model", "naimark", "--method", "both-with-diff", "--h", "1e-2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l == "t,k_reference,k_marched,diff"));
    let tv: f64 = header_value(&s, "tv_difference").unwrap().parse().unwrap();
    assert!(tv < 5e-2, "{tv}");
}

#[test]
fn classify_verdicts() {
    let bk = stdout(&run(&["classify", "--model", "bessel-kingman:2"]));
    assert_eq!(header_value(&bk, "verdict"), Some("invariance-regime"));
    let n = stdout(&run(&["classify", "--model", "naimark"]));
    assert_eq!(header_value(&n, "verdict"), Some("nu-infinity-regime"));
    let ft: f64 = header_value(&n, "ft_min").unwrap().parse().unwrap();
    assert!(ft > 0.0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["nu-infty", "--model", "bessel-kingman:2"]).status.code(), Some(2));
    assert_eq!(run(&["cfun", "--model", "bessel-kingman:2"]).status.code(), Some(2));
    assert_eq!(run(&["kernel", "--model", "no-such-model"]).status.code(), Some(1));
    assert_eq!(run(&["kernel"]).status.code(), Some(1));
    assert_eq!(run(&["kernel", "--model", "naimark", "--x", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["kernel", "--unknown-flag"]).status.code(), Some(1));
    assert_eq!(run(&["kernel", "--model", "naimark", "--tol", "x=1"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--tol", "no-such-check=1"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn model_file_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.model");
    fs::write(&good, "family = custom\na = sinh(x)^2\n").unwrap();
    let o = run(&["model", "validate", "--model", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(header_value(&stdout(&o), "passed"), Some("true"));

    let bad = dir.path().join("bad.model");
    fs::write(&bad, "family = custom\na = sinh(x\n").unwrap();
    assert_eq!(run(&["model", "validate", "--model", bad.to_str().unwrap()]).status.code(), Some(1));

    let o = run(&["model", "validate", "--model", "bessel-kingman:2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["summary"]["growth"], "sub-exponential");
    assert_eq!(v["summary"]["a_bounded"], false);
}

fn outputs(dir: &Path, args: &[&str]) -> Vec<u8> {
    let mut a: Vec<&str> = args.to_vec();
    let d = dir.to_str().unwrap();
    a.extend(["--out", d]);
    let o = run(&a);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    assert_eq!(entries.len(), 1);
    fs::read(&entries[0]).unwrap()
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["nu", "--model", "jacobi:1,0", "--y", "1.5", "--h", "1e-2"][..],
        &["nu-infty", "--model", "naimark", "--format", "json"][..],
        &["distances", "--model", "bessel-kingman:2", "--ymax", "4"][..],
        &["verify", "--criteria", "1,3", "--format", "json"][..],
    ] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert_eq!(outputs(a.path(), args), outputs(b.path(), args), "{args:?}");
    }
}

#[test]
fn out_directory_file_names() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "eigen",
        "--model",
        "naimark",
        "--lambda",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("eigen.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["rows"][0]["re_phi"], 1.0);
    assert_eq!(v["config"]["lambda_re"], 1.0);
}

#[test]
fn every_command_writes_stable_header() {
    let cases: [(&[&str], &str); 7] = [
        (&["translate", "--model", "naimark", "--y", "0.5", "--xmax", "2"], "x,value"),
        (&["eigen", "--model", "naimark", "--xmax", "2"], "x,re_phi,im_phi"),
        (&["cfun", "--model", "naimark", "--lambda", "1"], "lambda,re_c,im_c,residual"),
        (&["nu", "--model", "naimark"], "t,density"),
        (&["nu-infty", "--model", "naimark", "--route", "limit"], "t,density"),
        (
            &["classify", "--model", "bounded-demo"],
            "y,d_inv,d_shift,d_center,d_limit,weakstar,dilated_t2",
        ),
        (&["model", "validate", "--model", "naimark"], "x,log_a,log_deriv"),
    ];
    for (args, header) in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let s = stdout(&o);
        assert_eq!(s.lines().find(|l| !l.starts_with('#')), Some(header), "{args:?}");
    }
}

#[test]
fn cfun_naimark_at_one() {
    let s = stdout(&run(&["cfun", "--model", "naimark", "--lambda", "1"]));
    let r = row_at(&s, 1.0);
    assert!(r[1].abs() < 1e-4 && (r[2] + 1.0).abs() < 1e-4, "{r:?}");
}

#[test]
fn verify_failures_exit_three() {
    let o = run(&["verify", "--criteria", "1", "--tol", "naimark-kernel-mass=1e-30"]);
    assert_eq!(o.status.code(), Some(3));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l.starts_with("1a,naimark-kernel-mass,") && l.contains(",false,")));
    let o = run(&["verify", "--criteria", "1,3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_json_schema() {
    let o = run(&["verify", "--criteria", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for e in v["rows"].as_array().unwrap() {
        for k in ["criterion", "measured", "expected", "tolerance", "provenance", "pass"] {
            assert!(e.get(k).is_some(), "{k} missing");
        }
    }
}

#[test]
fn thread_cap() {
    let o = Command::new(env!("CARGO_BIN_EXE_hyperconv"))
        .args(["verify", "--criteria", "1"])
        .env("HYPERCONV_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_hyperconv"))
        .args(["verify", "--criteria", "1"])
        .env("HYPERCONV_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
