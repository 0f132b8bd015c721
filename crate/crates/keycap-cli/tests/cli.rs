//! End-to-end checks of the `keycap` binary: artifact shapes, byte-level
//! reproducibility, machine-readable error records, and the committed
//! exact-mode regression fixtures.

use std::io::Write;
use std::process::{Command, Output};

fn keycap() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_keycap"));
    // Instance paths in the fixtures are relative to the crate root, and the
    // ambient environment must not leak a default seed into the runs.
    c.current_dir(env!("CARGO_MANIFEST_DIR"));
    c.env_remove("KEYCAP_DEFAULT_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    keycap().args(args).output().expect("binary should spawn")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout should be utf-8")
}

// ---------------------------------------------------------------------------
// CSV artifact shape
// ---------------------------------------------------------------------------

#[test]
fn sweep_snr_defaults_emit_thirteen_csv_rows() {
    let text = stdout_of(&["sweep-snr", "--samples", "200", "--seed", "7"]);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# {"), "missing config echo: {}", lines[0]);
    assert_eq!(lines[1], "axis_value,mean_bits,stderr_bits,n_samples");
    let rows = &lines[2..];
    assert_eq!(rows.len(), 13, "default grid is -5..25 dB in 2.5 dB steps");
    for (i, row) in rows.iter().enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 4, "row {i}: {row}");
        let axis: f64 = fields[0].parse().unwrap();
        assert!((axis - (-5.0 + 2.5 * i as f64)).abs() < 1e-12);
        assert_eq!(fields[3], "200");
    }
}

#[test]
fn sweep_json_format_carries_the_full_series() {
    let text = stdout_of(&["sweep-alpha", "--samples", "150", "--seed", "3", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["command"], "sweep-alpha");
    let points = doc["result"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 9, "default alpha grid is 0..20 dB in 2.5 dB steps");
    assert_eq!(doc["config"]["mc"]["seed"], 3);
}

// ---------------------------------------------------------------------------
// Reproducibility
// ---------------------------------------------------------------------------

#[test]
fn echoed_config_reproduces_the_output_byte_for_byte() {
    let first = stdout_of(&["sweep-snr", "--samples", "120", "--seed", "9"]);
    let echo_line = first.lines().next().unwrap().strip_prefix("# ").unwrap();
    let echo: serde_json::Value = serde_json::from_str(echo_line).unwrap();

    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{}", echo["config"]).unwrap();
    let path = file.path().to_str().unwrap();

    let second = stdout_of(&["sweep-snr", "--config", path]);
    assert_eq!(first, second, "re-running with the echoed config must reproduce the bytes");
}

#[test]
fn workers_do_not_change_output_bytes() {
    let reference = stdout_of(&["capacity", "--samples", "400", "--seed", "5", "--workers", "1"]);
    for workers in ["2", "8"] {
        let other = stdout_of(&["capacity", "--samples", "400", "--seed", "5", "--workers", workers]);
        assert_eq!(reference, other, "workers = {workers}");
    }
}

#[test]
fn seed_env_var_matches_the_explicit_flag() {
    let via_env = {
        let out = keycap()
            .args(["capacity", "--samples", "200"])
            .env("KEYCAP_DEFAULT_SEED", "123")
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let via_flag = stdout_of(&["capacity", "--samples", "200", "--seed", "123"]);
    assert_eq!(via_env, via_flag);
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("est.json");
    let args = ["capacity", "--samples", "250", "--seed", "4"];
    let streamed = stdout_of(&args);
    let out = run(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "nothing goes to stdout when --out is set");
    assert_eq!(std::fs::read_to_string(&path).unwrap(), streamed);
}

// ---------------------------------------------------------------------------
// Direct result checks
// ---------------------------------------------------------------------------

#[test]
fn capacity_with_zero_power_reports_exactly_zero() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(
        file,
        "{}",
        serde_json::json!({
            "channel": {
                "m_s": 1, "m_d": 1, "m_w": 1,
                "power": 0.0, "sigma2_d": 1.0, "sigma2_w": 1.0, "alpha2": 1.0
            },
            "mc": { "n_samples": 100 }
        })
    )
    .unwrap();
    let text = stdout_of(&["capacity", "--config", file.path().to_str().unwrap()]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["result"]["mean_bits"], 0.0);
    assert_eq!(doc["result"]["stderr_bits"], 0.0);
}

#[test]
fn micro_instance_matches_the_committed_exact_fixture() {
    let text = stdout_of(&["protocol", "--instance", "instances/micro_bsc.json", "--seed", "42"]);
    assert_eq!(text, include_str!("fixtures/micro_bsc_exact.json"));
}

#[test]
fn quaternary_demo_matches_the_committed_exact_fixture() {
    let text =
        stdout_of(&["protocol", "--instance", "instances/quaternary_demo.json", "--seed", "42"]);
    assert_eq!(text, include_str!("fixtures/quaternary_demo_exact.json"));
}

// ---------------------------------------------------------------------------
// Error records
// ---------------------------------------------------------------------------

fn error_record(out: &Output) -> serde_json::Value {
    assert!(!out.status.success(), "command should fail");
    let stderr = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(stderr.trim()).unwrap_or_else(|e| {
        panic!("stderr is not a JSON error record ({e}): {stderr}");
    })
}

#[test]
fn missing_config_yields_a_config_error_record() {
    let out = run(&["capacity", "--config", "no_such_file.json"]);
    let record = error_record(&out);
    assert_eq!(record["error"]["kind"], "config");
    assert_eq!(record["error"]["command"], "capacity");
    assert!(!record["error"]["message"].as_str().unwrap().is_empty());
}

#[test]
fn csv_is_rejected_outside_the_pointwise_commands() {
    let out =
        run(&["protocol", "--instance", "instances/micro_bsc.json", "--format", "csv"]);
    let record = error_record(&out);
    assert_eq!(record["error"]["kind"], "config");
    assert_eq!(record["error"]["command"], "protocol");
}

#[test]
fn oversized_exact_enumeration_reports_cap_exceeded() {
    let out = run(&[
        "protocol",
        "--instance",
        "instances/micro_bsc.json",
        "--blocklength",
        "12",
        "--seed",
        "1",
    ]);
    let record = error_record(&out);
    assert_eq!(record["error"]["kind"], "cap_exceeded");
    assert_eq!(record["error"]["command"], "protocol");
}

#[test]
fn missing_instance_path_is_a_config_error() {
    let out = run(&["protocol"]);
    let record = error_record(&out);
    assert_eq!(record["error"]["kind"], "config");
}

#[test]
fn help_prints_and_exits_zero() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("keycap"));
    assert!(text.contains("sweep-snr"));
}
