use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use trpca::io::{read_tensor, write_tensor};
use trpca::tensor::{Dims, Tensor3};

fn trpca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trpca"))
        .args(args)
        .env_remove("RTPCA_THREADS")
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = trpca(&["tsvd", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn tsvd_writes_factors_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "A.t3");
    write_tensor(&a, &Tensor3::identity(3, 4)).unwrap();
    let out = trpca(&["tsvd", "--in", &a, "--tol", "1e-10"]);
    assert!(out.status.success());
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.starts_with("rank=3 nuclear=3"), "{summary}");
    let s = read_tensor(dir.path().join("A.S.t3")).unwrap();
    assert!(s.distance(&Tensor3::identity(3, 4)) < 1e-12);
    assert!(dir.path().join("A.U.t3").exists() && dir.path().join("A.V.t3").exists());
}

#[test]
fn missing_input_is_a_computation_error() {
    let out = trpca(&["tsvd", "--in", "/nonexistent/A.t3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn malformed_file_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "bad.t3");
    fs::write(&a, "1 1 2\n1 oops\n").unwrap();
    let out = trpca(&["solve", "--in", &a]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn solve_on_zero_input() {
    let dir = tempfile::tempdir().unwrap();
    let x = path(dir.path(), "X.t3");
    write_tensor(&x, &Tensor3::zeros(Dims::new(3, 3, 2))).unwrap();
    let out = trpca(&["solve", "--in", &x, "--gamma", "auto", "--penalty", "tube"]);
    assert!(out.status.success());
    let line = String::from_utf8(out.stdout).unwrap();
    assert!(line.starts_with("iters=0 residual="), "{line}");
    assert!(read_tensor(dir.path().join("X.L.t3")).unwrap().is_zero());
    assert!(read_tensor(dir.path().join("X.E.t3")).unwrap().is_zero());
}

#[test]
fn bad_gamma_is_rejected() {
    let out = trpca(&["solve", "--in", "x.t3", "--gamma", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (l, e) = (path(dir.path(), "L.t3"), path(dir.path(), "E.t3"));
    let out = trpca(&["synth", "--dims", "6", "6", "2", "--rank", "2", "--sparsity", "20", "--out-l", &l, "--out-e", &e]);
    assert!(out.status.success());
    // A dense support on a tiny tensor cannot meet the incoherence condition.
    let out = trpca(&["certify", "--L", &l, "--E", &e, "--condition", "cor3"]);
    assert_eq!(out.status.code(), Some(3));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("gamma_range_cor3: none"));
    assert!(report.contains("condition: cor3 violated"));
}

#[test]
fn certify_recipe_instance_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (l, e) = (path(dir.path(), "L0.t3"), path(dir.path(), "E0.t3"));
    let out = trpca(&["synth", "--certified", "--seed", "7", "--out-l", &l, "--out-e", &e]);
    assert!(out.status.success());
    let out = trpca(&["certify", "--L", &l, "--E", &e, "--condition", "cor3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.lines().any(|l| l.starts_with("gamma_range: ") && !l.ends_with("none")));
    let out = trpca(&["certify", "--L", &l, "--E", &e, "--condition", "dual", "--p", "0.9"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("dual_certified: true"));
}

#[test]
fn sweep_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.csv"), path(dir.path(), "b.csv"));
    let args = |out: &str| {
        vec![
            "sweep".to_owned(), "--out".into(), out.into(), "--dims".into(), "12".into(), "12".into(), "2".into(),
            "--ranks".into(), "0,1".into(), "--sparsities".into(), "0,2".into(), "--gammas".into(), "auto,p0.5".into(),
            "--seed".into(), "11".into(),
        ]
    };
    let run = |out: &str| {
        let argv = args(out);
        let refs: Vec<&str> = argv.iter().map(String::as_str).collect();
        trpca(&refs)
    };
    assert!(run(&a).status.success());
    let threaded = Command::new(env!("CARGO_BIN_EXE_trpca"))
        .args(args(&b))
        .env("RTPCA_THREADS", "3")
        .output()
        .unwrap();
    assert!(threaded.status.success());
    let (ca, cb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ca, cb);
    let text = String::from_utf8(ca).unwrap();
    assert!(text.starts_with("r,sparsity,gamma,p,inc,mu,deg_max,cert_ok,dual_ok,err_L,err_E,success,seconds\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_trpca"))
        .args(["sweep", "--out", &path(dir.path(), "s.csv")])
        .env("RTPCA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
