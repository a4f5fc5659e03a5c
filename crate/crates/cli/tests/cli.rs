use std::process::{Command, Output};

use cuspdet::zetadet::DeterminantReport;
use cuspdet_cli::checks::CheckRow;
use cuspdet_cli::{from_csv, EigenRow, Envelope, SCHEMA_VERSION};

fn cuspdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuspdet")).args(args).env_remove("CUSPDET_PRECISION").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn det_json_round_trips() {
    let o = cuspdet(&["det", "--a", "1", "--alpha", "0.3", "--mu", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let env: Envelope<DeterminantReport> = serde_json::from_str(&text).unwrap();
    assert_eq!(env.schema_version, SCHEMA_VERSION);
    let again = serde_json::to_string_pretty(&env).unwrap() + "\n";
    assert_eq!(again, text);
    let sum: f64 = env.result.family_contributions.values().sum::<f64>() + env.result.numeric_remainder;
    assert!((sum - env.result.logdet).abs() < 1e-12);
}

#[test]
fn eig_csv_header_and_round_trip() {
    let o = cuspdet(&["eig", "--a", "1", "--alpha", "0", "--lambda-max", "100", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("k,j,r,lambda,residual\n"));
    let rows: Vec<EigenRow> = from_csv(&text).unwrap();
    assert!(!rows.is_empty());
    assert_eq!(cuspdet_cli::to_csv(&rows).unwrap(), text);
}

#[test]
fn invalid_inputs_exit_one() {
    let o = cuspdet(&["det", "--alpha", "1.2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 ≤ α < 1"));
    assert_eq!(cuspdet(&["det", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(cuspdet(&["det", "--a", "-1"]).status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_cuspdet")).args(["det"]).env("CUSPDET_PRECISION", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn precision_env_is_reported() {
    let o = Command::new(env!("CARGO_BIN_EXE_cuspdet"))
        .args(["count", "--lambda-max", "50", "--format", "json"])
        .env("CUSPDET_PRECISION", "1e-9")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["precision_target"], 1e-9);
    assert!(v["result"].as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("cuspdet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "# residual table\ngrid-var = a\ngrid = 5, 10\nalpha = 0.3\nformat = json\n").unwrap();
    let o = cuspdet(&["asym", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("grid_value,logdet,formula,residual,est_error\n"), "{text}");
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn verify_hypergeom_passes() {
    let o = cuspdet(&["verify", "hypergeom", "--quick"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<CheckRow> = from_csv(&stdout(&o)).unwrap();
    assert!(rows.iter().all(|r| r.pass && r.measured <= 1e-9));
}

#[test]
fn verify_quick_is_thread_count_independent() {
    let a = cuspdet(&["verify", "spectrum", "--quick", "--parallelism", "1"]);
    let b = cuspdet(&["verify", "spectrum", "--quick", "--parallelism", "8"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_and_zeta_run() {
    let o = cuspdet(&["sweep", "--grid", "0,1", "--alpha", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = cuspdet(&["zeta", "--alpha", "0.3", "--s", "1.5", "--k-max", "2", "--r-max", "40"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o).lines().nth(1).unwrap().to_string();
    let diff: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
    assert!(diff < 1e-5, "{line}");
}
