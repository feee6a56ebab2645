//! End-to-end checks of the installed binary: exit codes, report schema,
//! determinism, config round-trip, and state dumps.

use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vcs-kit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| serde_json::from_str(l).expect("report line parses as JSON"))
        .collect()
}

#[test]
fn canonical_stock_suite_exits_zero() {
    let out = run(&["verify", "--family", "canonical", "--M", "64", "--tol", "1e-6"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let reports = stdout_lines(&out);
    assert!(reports.len() >= 13);
    for r in &reports {
        for key in ["check", "family", "kappa", "M", "residual", "tol", "pass", "params"] {
            assert!(r.get(key).is_some(), "missing {key} in {r}");
        }
        assert_eq!(r["pass"], serde_json::Value::Bool(true));
        assert_eq!(r["family"], "canonical");
    }
}

#[test]
fn gilmore_perelomov_suite_exits_zero() {
    let out = run(&["verify", "--family", "gilmore-perelomov", "--kappa", "1.5", "--M", "256"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let reports = stdout_lines(&out);
    assert!(reports.iter().all(|r| r["pass"] == serde_json::Value::Bool(true)));
    assert!(reports.iter().any(|r| r["check"] == "su11-exponential"));
}

#[test]
fn tiny_truncation_fails_with_diagnostics() {
    let out = run(&["verify", "--family", "canonical", "--M", "2"]);
    let code = out.status.code().unwrap();
    assert!(code > 0, "expected failing exit, got {code}");
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("required_modes"), "no tail diagnostics in: {text}");
    assert!(text.contains("tail"), "no tail-budget message in: {text}");
    let failed = stdout_lines(&out)
        .iter()
        .filter(|r| r["pass"] == serde_json::Value::Bool(false))
        .count();
    assert_eq!(code as usize, failed, "exit code must equal failed-check count");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["verify", "--family", "barut-girardello", "--kappa", "1", "--seed", "7"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_format_emits_header_and_rows() {
    let out = run(&["verify", "--family", "interpolating", "--kappa", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "check,family,kappa,M,residual,tol,pass,params");
    assert!(lines.all(|l| l.starts_with(|c: char| c.is_ascii_lowercase())));
}

#[test]
fn config_file_drives_the_run_and_flags_override() {
    let dir = std::env::temp_dir();
    let cfg_path = dir.join("vcs_kit_cli_test_config.json");
    let out_path = dir.join("vcs_kit_cli_test_reports.jsonl");
    let mut f = std::fs::File::create(&cfg_path).unwrap();
    write!(
        f,
        r#"{{"family":"barut-girardello","kappa":2.0,"M":32,"out":{:?}}}"#,
        out_path.to_str().unwrap()
    )
    .unwrap();
    let out = run(&["verify", "--config", cfg_path.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let reports = stdout_lines(&out);
    assert!(reports.iter().all(|r| r["family"] == "barut-girardello" && r["M"].as_u64().unwrap() <= 32));
    let written = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(written.as_bytes(), out.stdout.as_slice(), "--out file mirrors stdout");
    std::fs::remove_file(cfg_path).ok();
    std::fs::remove_file(out_path).ok();
}

#[test]
fn unknown_family_is_a_usage_error() {
    let out = run(&["verify", "--family", "nonsense"]);
    assert_eq!(out.status.code(), Some(2), "clap rejects bad values");
}

#[test]
fn dump_state_at_origin_has_one_coefficient() {
    let out = run(&["dump-state", "--family", "canonical", "--j", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let quads = doc["coefficients"].as_array().unwrap();
    assert_eq!(quads.len(), 1);
    assert_eq!(quads[0][0], 1);
    assert_eq!(quads[0][1], 0);
    assert!((quads[0][2].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    assert!(doc["kernel_row"]["row"].as_array().unwrap().len() == 2);
}

#[test]
fn dump_state_outside_the_disc_is_rejected() {
    let out = run(&[
        "dump-state",
        "--family",
        "gilmore-perelomov",
        "--kappa",
        "1",
        "--r",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("domain"), "stderr: {err}");
}

#[test]
fn dump_coefficients_follow_the_canonical_series() {
    let out = run(&["dump-state", "--family", "canonical", "--r", "1", "--theta", "0.7", "--j", "1", "--M", "32"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let quads = doc["coefficients"].as_array().unwrap();
    // Σ_j' |c_{j',m}|² = e^{−1}/(2·m!) at r = 1
    let mut by_mode = vec![0.0f64; 32];
    for q in quads.iter().map(|q| q.as_array().unwrap()) {
        let m = q[1].as_u64().unwrap() as usize;
        by_mode[m] += q[2].as_f64().unwrap().powi(2) + q[3].as_f64().unwrap().powi(2);
    }
    let mut fact = 1.0f64;
    for (m, tot) in by_mode.iter().enumerate().take(10) {
        if m > 0 {
            fact *= m as f64;
        }
        let want = (-1.0f64).exp() / (2.0 * fact);
        assert!((tot - want).abs() < 1e-12, "mode {m}: {tot} vs {want}");
    }
}
