use std::path::Path;
use std::process::Command;

use ma_array_opt::harness::{run_cli, CSV_HEADER, CSV_VERSION_LINE};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Run {
    let mut argv = vec!["ma-array-opt"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_VERSION_LINE));
    assert_eq!(lines.next(), Some(CSV_HEADER));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(cli(&["--help"]).code, 0);
    assert_eq!(cli(&["--version"]).code, 0);
    assert!(cli(&["solve", "--help"]).stdout.contains("--multi-start"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cli(&[]).code, 1);
    assert_eq!(cli(&["optimize"]).code, 1);
    assert_eq!(cli(&["solve", "--bogus"]).code, 1);
    assert_eq!(cli(&["solve", "--algo", "XYZ"]).code, 1);
    assert_eq!(cli(&["solve", "--tol", "-1"]).code, 1);
    assert_eq!(cli(&["solve", "--multi-start", "0"]).code, 1);
}

#[test]
fn config_errors_exit_one_and_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let r = cli(&["solve", "--config", missing.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("nope.json"));

    let bad_type = write_config(dir.path(), "a.json", r#"{"n_antennas": "three"}"#);
    let r = cli(&["solve", "--config", &bad_type]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("n_antennas"), "{}", r.stderr);

    let unknown = write_config(dir.path(), "b.json", r#"{"antennas": 3}"#);
    assert_eq!(cli(&["solve", "--config", &unknown]).code, 1);

    let both = write_config(dir.path(), "c.json", r#"{"tx_power": 1.0, "tx_power_db": 0.0}"#);
    assert_eq!(cli(&["solve", "--config", &both]).code, 1);

    let wrong_kind = write_config(dir.path(), "d.json", r#"{"kind": "sweep-n"}"#);
    assert_eq!(cli(&["solve", "--config", &wrong_kind]).code, 1);

    let too_short = write_config(dir.path(), "e.json", r#"{"n_antennas": 5, "segment_length": 1.0}"#);
    let r = cli(&["solve", "--config", &too_short]);
    assert_eq!(r.code, 1);

    let big_oracle = write_config(dir.path(), "f.json", r#"{"n_antennas": 4, "algorithms": ["ORACLE"]}"#);
    let r = cli(&["baselines", "--config", &big_oracle]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("oracle"), "{}", r.stderr);
}

#[test]
fn solve_prints_summary() {
    let r = cli(&["solve"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let line = r.stdout.lines().next().unwrap();
    for key in ["MM:", "lambda_max=", "snr_db=", "rate=", "bound=6", "iterations="] {
        assert!(line.contains(key), "{line}");
    }
}

#[test]
fn solve_json_carries_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solve.json");
    let r = cli(&["solve", "--algo", "MM,FPA,BOUND", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let mm = &rows[0];
    assert_eq!(mm["scheme"], "MM");
    assert_eq!(mm["x"].as_array().unwrap().len(), 3);
    let power: f64 = mm["w"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p[0].as_f64().unwrap().powi(2) + p[1].as_f64().unwrap().powi(2))
        .sum();
    assert!((power - 1.0).abs() < 1e-12);
    assert_eq!(rows[1]["x"], serde_json::json!([0.0, 0.5, 1.0]));
    assert_eq!(rows[2]["value"], 6.0);
    assert!(rows[2].get("x").is_none());
}

#[test]
fn sweep_n_rows_and_bound() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.json",
        r#"{"n_values": [3, 4], "algorithms": ["FPA", "BOUND"], "tx_power_db": 20}"#,
    );
    let out = dir.path().join("sweep.csv");
    let r = cli(&["sweep-n", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 4);
    let schemes: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(schemes, ["FPA", "BOUND", "FPA", "BOUND"]);
    for row in rows.iter().filter(|r| r[1] == "BOUND") {
        let n: f64 = row[2].parse().unwrap();
        let m: f64 = row[3].parse().unwrap();
        let value: f64 = row[7].parse().unwrap();
        assert_eq!(row[0], "sweep-n");
        assert_eq!(row[6].parse::<f64>().unwrap(), n);
        assert!((value - (1.0 + 100.0 * m * n).log2()).abs() < 1e-12);
    }
}

#[test]
fn convergence_with_one_receiver_is_a_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "conv.json",
        r#"{"angles": [0.7], "segment_lengths": [4.0], "algorithms": ["MM"]}"#,
    );
    let out = dir.path().join("conv.csv");
    let r = cli(&["convergence", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][6], "0");
    assert!((rows[0][7].parse::<f64>().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn convergence_traces_follow_segment_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let r = cli(&["convergence", "--algo", "MM,FPA", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = csv_rows(&out);
    let mut ls: Vec<String> = rows.iter().map(|r| r[4].clone()).collect();
    ls.dedup();
    assert_eq!(ls, ["1", "3", "20"]);
    for l in ["1", "3", "20"] {
        let trace: Vec<f64> = rows
            .iter()
            .filter(|r| r[4] == l && r[1] == "MM")
            .map(|r| r[7].parse().unwrap())
            .collect();
        assert!(!trace.is_empty());
        assert!(trace.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        let fpa: f64 = rows.iter().find(|r| r[4] == l && r[1] == "FPA").unwrap()[7].parse().unwrap();
        assert!(trace.last().unwrap() >= &(fpa - 1e-9));
    }
}

#[test]
fn beampattern_single_angle_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bp.json",
        r#"{"theta_grid": {"start": 0.5, "stop": 0.5, "step": 0.0}, "algorithms": ["MM", "FPA", "BOUND"]}"#,
    );
    let out = dir.path().join("bp.csv");
    let r = cli(&["beampattern", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = csv_rows(&out);
    let gains: Vec<&Vec<String>> = rows.iter().filter(|r| r[0] == "beampattern").collect();
    let markers: Vec<&Vec<String>> = rows.iter().filter(|r| r[0] == "beampattern_marker").collect();
    assert_eq!(gains.len(), 2);
    assert!(gains.iter().all(|r| r[6] == "0.5"));
    assert_eq!(markers.len(), 4);
    assert!(rows.iter().all(|r| r[1] != "BOUND"));
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let r = cli(&["baselines", "--multi-start", "3", "--seed", "11", "--out", p.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{}", r.stderr);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ma-array-opt");
    let ok = Command::new(bin).args(["solve", "--max-iters", "5"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("lambda_max="));
    let bad = Command::new(bin).args(["solve", "--config", "/nonexistent/x.json"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let threads = Command::new(bin)
        .args(["solve", "--max-iters", "5"])
        .env("MA_OPT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(1));
}

#[test]
fn output_independent_of_thread_count() {
    let bin = env!("CARGO_BIN_EXE_ma-array-opt");
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let path = dir.path().join(format!("t{threads}.json"));
        let st = Command::new(bin)
            .args(["baselines", "--multi-start", "5", "--out", path.to_str().unwrap()])
            .env("MA_OPT_THREADS", threads)
            .status()
            .unwrap();
        assert!(st.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
