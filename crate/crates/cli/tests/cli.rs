use std::path::Path;
use std::process::{Command, Output};

const CANONICAL: &str = "beta = 0.9\nR = 1\ny_L = 0\ny_H = 3\nlambda = 1\nmu = 0\n";

fn dfm(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dfm"));
    cmd.args(args).env_remove("DFM_CONFIG");
    if let Some(path) = config {
        cmd.env("DFM_CONFIG", path);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.split_once('=').filter(|(k, _)| k.trim() == key).map(|(_, v)| v.trim().parse().unwrap()))
        .unwrap_or_else(|| panic!("{key} missing"))
}

fn config_file(dir: &tempfile::TempDir, text: &str) -> std::path::PathBuf {
    let path = dir.path().join("model.cfg");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn solve_from_flags() {
    let out =
        dfm(&["solve", "--beta", "0.9", "--R", "1", "--y_L", "0", "--y_H", "3", "--lambda", "1", "--mu", "0"], None);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!((value(&text, "psi_star") - 13.5).abs() < 1e-12);
    assert!((value(&text, "premium") - 4.5).abs() < 1e-12);
    assert!((value(&text, "mu_bar") - 0.1).abs() < 1e-12);
}

#[test]
fn config_from_environment_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = config_file(&dir, CANONICAL);
    let base = dfm(&["solve"], Some(&path));
    assert!(base.status.success(), "{}", stderr(&base));
    let shifted = dfm(&["solve", "--mu", "-0.05"], Some(&path));
    assert!(shifted.status.success(), "{}", stderr(&shifted));
    // price rises as money growth falls
    assert!(value(&stdout(&shifted), "psi_star") > value(&stdout(&base), "psi_star"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = config_file(&dir, &CANONICAL.replace("y_H = 3\n", ""));
    let out = dfm(&["solve"], Some(&missing));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("y_H required"));

    let path = config_file(&dir, CANONICAL);
    let out = dfm(&["solve", "--mu", "0.3"], Some(&path));
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("collapses"));

    let out = dfm(&["solve", "--config", "/nonexistent/model.cfg"], None);
    assert_eq!(out.status.code(), Some(4));

    let out = dfm(&["solve", "--beta", "1.2"], Some(&path));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("beta out of (0,1)"));
}

#[test]
fn unknown_config_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = config_file(&dir, &format!("{CANONICAL}gamma = 1\n"));
    let out = dfm(&["solve"], Some(&path));
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line 7: unknown key 'gamma'") && err.contains("lambda"), "{err}");
}

#[test]
fn sweep_csv_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let path = config_file(&dir, CANONICAL);
    let mut files = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let target = dir.path().join(name);
        let args = ["sweep", "--var", "mu", "--from", "-0.1", "--to", "0.1", "--points", "21", "--output"];
        let out = dfm(&[&args[..], &[target.to_str().unwrap()]].concat(), Some(&path));
        assert!(out.status.success(), "{}", stderr(&out));
        files.push(std::fs::read(&target).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files.remove(0)).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "var,psi_star,premium,z_star,welfare_surplus,in_range");
    assert_eq!(data.len(), 22);
    assert!(data[1..].iter().all(|l| l.ends_with(",true")));
    assert!(!text.contains('\r'));
}

#[test]
fn dynamics_and_simulation_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = config_file(&dir, CANONICAL);
    let out = dfm(&["dynamics", "--z0", "13.6", "-T", "10"], Some(&path));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("\nt,z,psi\n0,13.6,"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 12);

    let records = dir.path().join("records.csv");
    let out = dfm(
        &[
            "simulate",
            "-N",
            "1000",
            "-T",
            "5",
            "--seed",
            "3",
            "--protocol",
            "bargaining",
            "-o",
            records.to_str().unwrap(),
        ],
        Some(&path),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("protocol               = bargaining"));
    let csv = std::fs::read_to_string(&records).unwrap();
    assert!(csv.contains("\nperiod,Q,price,surplus\n0,"));

    let out = dfm(&["simulate", "-N", "999", "--protocol", "bargaining"], Some(&path));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("odd number of agents"));
}

#[test]
fn bargain_contrast() {
    let dir = tempfile::tempdir().unwrap();
    let path = config_file(&dir, CANONICAL);
    let out = dfm(&["bargain"], Some(&path));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!((value(&text, "psi_star") - 9.0).abs() < 1e-12);
    assert!((value(&text, "mu_bar_b") + 0.0583333).abs() < 1e-6);
}
