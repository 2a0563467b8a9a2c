use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ibclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ibclab"))
        .args(args)
        .env("IBCLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn selftest_exits_zero() {
    let out = ibclab(&["selftest"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn simulate_writes_golden_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sim.toml",
        "[domain]\ncells = 40\n[kernel]\nz0 = 1.0\nz_tau = 0.5\ntau = 0.3\n[time]\nt_final = 0.5\n[outputs]\ncsv = \"out/run.csv\"\n",
    );
    let out = ibclab(&["simulate", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("out/run.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("t,E_total,E_wave,E_delay,E_diff,E_eta,u_n,p_boundary")
    );
    assert!(csv.lines().count() > 2);
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let text = "seed = 5\n[domain]\ncells = 30\n[kernel]\nz0 = 0.8\n[time]\nt_final = 0.3\n[initial]\nkind = \"random_smooth\"\n";
    let cfg = write_config(dir.path(), "a.toml", text);
    let a = ibclab(&["simulate", &cfg]).stdout;
    let b = ibclab(&["simulate", &cfg]).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn spectrum_lossless_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "spec.toml",
        "[domain]\ncells = 30\n[bc]\nleft = \"neumann\"\nright = \"dirichlet\"\n",
    );
    let out = ibclab(&["spectrum", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["max_re"].as_f64().unwrap().abs() <= 1e-10);
    assert!(v["dissipativity"].as_f64().unwrap().abs() <= 1e-10);
}

#[test]
fn invalid_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.toml",
        "[kernel]\nz0 = 1.0\nz_tau = 0.5\ntau = 0.3\n[time]\ndt = 0.07\n",
    );
    let out = ibclab(&["simulate", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("time.dt"));
    assert_eq!(
        ibclab(&["simulate", "/nonexistent/cfg.toml"]).status.code(),
        Some(1)
    );
}

#[test]
fn property_violation_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "k.toml",
        "[domain]\ncells = 20\n[kernel]\nz0 = 1.0\nz_tau = 0.5\ntau = 0.3\nk = 3.0\n",
    );
    assert_eq!(ibclab(&["spectrum", &cfg]).status.code(), Some(2));
    let cfg = write_config(
        dir.path(),
        "pr.toml",
        "[kernel]\nz0 = 0.5\nz_tau = 1.0\ntau = 0.3\n",
    );
    assert_eq!(ibclab(&["kernel-check", &cfg]).status.code(), Some(2));
}

#[test]
fn kernel_check_and_scan_pass_for_passive_delay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "d.toml",
        "[domain]\ncells = 50\n[kernel]\nz0 = 1.0\nz_tau = 0.5\ntau = 0.3\n[scan]\nn_real = 10\nn_imag = 5\n",
    );
    let out = ibclab(&["kernel-check", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pr"]["certified"], true);
    assert_eq!(v["delay_pr_condition"], true);
    let out = ibclab(&["resolvent-scan", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 1 + 20);
}

#[test]
fn measure_fit_reports_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m.toml",
        "[bc]\nright = \"dirichlet\"\n[measure]\ndescriptor = { kind = \"fractional\", alpha = 0.5 }\n[outputs]\ncsv = \"mu.csv\"\njson = \"fit.json\"\n",
    );
    let out = ibclab(&["measure-fit", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert!(v["max_rel_error"].as_f64().unwrap() <= 1e-3);
    assert!(fs::read_to_string(dir.path().join("mu.csv"))
        .unwrap()
        .starts_with("xi,w\n"));
}
