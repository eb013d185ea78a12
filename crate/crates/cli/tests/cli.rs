use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn central_spin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_central-spin"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("run_manifest.json")).unwrap()).unwrap()
}

const SMALL: &[&str] = &["--n", "4", "--t-end", "20", "--points", "201"];

fn with(cmd: &str, extra: &[&str]) -> Vec<String> {
    std::iter::once(cmd)
        .chain(SMALL.iter().copied())
        .chain(extra.iter().copied())
        .map(String::from)
        .collect()
}

fn run(dir: &Path, cmd: &str, extra: &[&str]) -> Output {
    let args = with(cmd, extra);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    central_spin(dir, &args)
}

#[test]
fn every_command_succeeds_on_a_small_bath() {
    for cmd in ["homogeneous", "inhomogeneous", "jc", "compare", "revivals", "fidelity-scan"] {
        let tmp = TempDir::new().unwrap();
        let out = run(tmp.path(), cmd, &[]);
        assert_eq!(code(&out), 0, "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(manifest(tmp.path())["command"], cmd);
    }
}

#[test]
fn sweeps_run_for_each_parameter() {
    let cases: [(&str, &[&str], &str, usize); 3] = [
        ("n", &["--values", "4,6,8"], "sweep_n.csv", 3),
        ("alpha", &["--profile", "exponential", "--values", "0,1"], "sweep_alpha.csv", 2),
        ("theta", &["--values", "1.0,1.5707963267948966"], "sweep_theta.csv", 2),
    ];
    for (param, extra, file, rows) in cases {
        let tmp = TempDir::new().unwrap();
        let mut args = vec!["--sweep", param];
        args.extend_from_slice(extra);
        let out = run(tmp.path(), "sweep", &args);
        assert_eq!(code(&out), 0, "{param}: {}", String::from_utf8_lossy(&out.stderr));
        let csv = fs::read_to_string(tmp.path().join(file)).unwrap();
        assert_eq!(csv.lines().count(), 1 + rows, "{param}");
    }
}

#[test]
fn manifest_checksums_match_written_files() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&run(tmp.path(), "homogeneous", &[])), 0);
    let m = manifest(tmp.path());
    let files = m["files"].as_array().unwrap();
    assert!(files.len() >= 3);
    for f in files {
        let bytes = fs::read(tmp.path().join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["bytes"].as_u64().unwrap(), bytes.len() as u64);
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(f["sha256"].as_str().unwrap(), digest);
    }
    assert_eq!(m["config"]["model"]["n"], 4);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    assert_eq!(code(&run(a.path(), "compare", &[])), 0);
    assert_eq!(code(&run(b.path(), "compare", &["--threads", "1"])), 0);
    for name in ["compare.csv", "compare.json", "compare_summary.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn flags_override_the_scenario_file() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("scenario.toml");
    fs::write(&cfg, "[model]\nn = 9\ntheta = 1.0\n[time]\nend = 30.0\npoints = 301\n").unwrap();
    let out_dir = tmp.path().join("out");
    let out = central_spin(&out_dir, &["homogeneous", "--config", cfg.to_str().unwrap(), "--n", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&out_dir);
    assert_eq!(m["config"]["model"]["n"], 5);
    assert_eq!(m["config"]["model"]["theta"], 1.0);
    assert_eq!(m["config"]["time"]["points"], 301);
}

#[test]
fn invalid_configuration_exits_with_2() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[model]\nn = 4\nbogus = 1\n").unwrap();
    let out = central_spin(&tmp.path().join("o1"), &["homogeneous", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    let out = run(&tmp.path().join("o2"), "homogeneous", &["--theta", "4.0"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("model.theta"));

    let out = run(&tmp.path().join("o3"), "compare", &["--profile", "exponential"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn oversized_exact_diagonalization_exits_with_3() {
    let tmp = TempDir::new().unwrap();
    let out = central_spin(tmp.path(), &["inhomogeneous", "--n", "9", "--ed-cap", "8", "--points", "11"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}
