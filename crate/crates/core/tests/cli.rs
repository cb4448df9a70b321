use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn oscillat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oscillat"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("small.toml");
    std::fs::write(
        &path,
        r#"
[coeff]
name = "sine1d"
params = { n = 64 }

[cell]
n = 64

[sweep]
eps = [0.125, 0.0625, 0.03125, 0.015625]
t = [1.0]
samples = 3
"#,
    )
    .unwrap();
    path
}

#[test]
fn selftest_passes() {
    let out = oscillat(&["selftest"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 10);
    assert!(text.lines().all(|l| l.starts_with("pass ")));
}

#[test]
fn usage_errors_exit_with_one() {
    let out = oscillat(&["frobnicate"]);
    assert_eq!(code(&out), 1);
    assert!(!out.stderr.is_empty());
    assert_eq!(code(&oscillat(&["sweep"])), 1);
    assert_eq!(code(&oscillat(&["sweep", "--config", "/nonexistent/study.toml"])), 1);
    assert_eq!(code(&oscillat(&["--help"])), 0);
}

#[test]
fn invalid_config_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[sweep]\neps = [0.5]\n").unwrap();
    let out = oscillat(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn sweep_writes_rates_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out_dir = dir.path().join("out");
    let out = oscillat(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let rates = std::fs::read_to_string(out_dir.join("rates.csv")).unwrap();
    assert!(rates.starts_with("estimate,eps,t,error,norm\n"));
    assert_eq!(rates.lines().count(), 1 + 4 * 4);
    let report = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert_eq!(report, String::from_utf8(out.stdout).unwrap());
    for line in report.lines() {
        let fields: Vec<&str> = line.split(' ').collect();
        assert_eq!(fields.len(), 4, "{line}");
        assert!(["pass", "none"].contains(&fields[3]), "{line}");
    }
}

#[test]
fn cell_and_evolve_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out_dir = dir.path().join("cell");
    let out = oscillat(&[
        "cell",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("cell.json")).unwrap()).unwrap();
    let g0 = json["g0"][0][0][0].as_f64().unwrap();
    assert!((g0 - 3f64.sqrt()).abs() < 1e-8);

    let out_dir = dir.path().join("evolve");
    let out = oscillat(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--eps",
        "0.125",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(out_dir.join("solution_t1.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "x1",
            "component",
            "u_eps_re",
            "u_eps_im",
            "u0_re",
            "u0_im",
            "v_eps_re",
            "v_eps_im"
        ]
    );
    // h = eps / 16 on the unit interval: 129 closed nodes.
    assert_eq!(rdr.records().count(), 129);
    assert!(out_dir.join("flux_t1.csv").exists());
}
