use std::path::{Path, PathBuf};

use monotone_delta::report::parse_csv_rows;
use monotone_delta_cli::run_cli;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mdelta").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL: &str = "q1,q2,q3\n1,2,3\n2,2,4\n3,4,3\n4,3,5\n5,5,4\n2,1,2\n";

fn small(dir: &TempDir) -> String {
    write(dir.path(), "small.csv", SMALL).display().to_string()
}

#[test]
fn compute_two_measures_json() {
    let dir = TempDir::new().unwrap();
    let r = run(&["compute", "--input", &small(&dir), "--measures", "alpha,delta", "--seed", "42", "--format", "json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stderr.is_empty());
    let json: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["measure"], "alpha");
    assert_eq!(rows[1]["measure"], "monotone_delta");
    assert_eq!(rows[0]["dataset"], "small");
    assert_eq!(json["meta"]["seed"], 42);
    for key in ["restarts", "variance_mode", "omega_variant", "split_scheme", "measures"] {
        assert!(json["meta"]["parameters"][key].is_string(), "{key}");
    }
}

#[test]
fn compute_table_by_default() {
    let dir = TempDir::new().unwrap();
    let r = run(&["compute", "--input", &small(&dir)]);
    assert_eq!(r.code, 0);
    let header = r.stdout.lines().next().unwrap();
    for m in ["alpha", "omega_sumsq", "omega_conventional", "glb", "split_half", "monotone_delta"] {
        assert!(header.contains(m), "{header}");
    }
}

#[test]
fn csv_round_trip() {
    let dir = TempDir::new().unwrap();
    let json = run(&["compute", "--input", &small(&dir), "--format", "json"]);
    let csv = run(&["compute", "--input", &small(&dir), "--format", "csv"]);
    let json: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    let rows = parse_csv_rows(&csv.stdout).unwrap();
    assert_eq!(rows.len(), json["rows"].as_array().unwrap().len());
    for (row, j) in rows.iter().zip(json["rows"].as_array().unwrap()) {
        assert_eq!(row.measure, j["measure"].as_str().unwrap());
        let want = j["value"].as_f64().unwrap();
        assert!((row.value.unwrap() - want).abs() <= 5e-5);
    }
}

#[test]
fn missing_input_is_io_error() {
    let r = run(&["compute", "--input", "/definitely/missing.csv"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error[IO]:"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn malformed_csv_is_data_error() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "bad.csv", "a,b\n1,2\n3,x\n");
    let r = run(&["compute", "--input", path.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error[NON_NUMERIC_CELL]:"), "{}", r.stderr);
}

#[test]
fn oracle_rejects_large_input() {
    let dir = TempDir::new().unwrap();
    let body: String = (0..50).map(|i| format!("{},{}\n", i % 5 + 1, i % 3 + 1)).collect();
    let path = write(dir.path(), "big.csv", &format!("a,b\n{body}"));
    let r = run(&["oracle", "--input", path.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error[INSTANCE_TOO_LARGE]:"), "{}", r.stderr);
}

#[test]
fn oracle_reports_both_searches() {
    let dir = TempDir::new().unwrap();
    let r = run(&["oracle", "--input", &small(&dir), "--format", "json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let json: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(json["rows"][0]["measure"], "exact_delta");
    assert_eq!(json["rows"][1]["measure"], "local_search_delta");
    assert!(json["rows"][1]["note"].as_str().unwrap().contains("matches_exact=true"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["compute"],
        vec!["frobnicate"],
        vec!["compute", "--input", "x.csv", "--format", "yaml"],
        vec!["compute", "--input", "x.csv", "--measures", "alpha,bogus"],
        vec!["scenario", "--n-items", "many"],
    ] {
        let r = run(&args);
        assert_eq!(r.code, 2, "{args:?}");
        assert!(r.stderr.starts_with("error[USAGE]:"), "{args:?}: {}", r.stderr);
        assert!(r.stdout.is_empty());
    }
}

#[test]
fn help_goes_to_stdout() {
    let r = run(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("dump-tournament"));
}

#[test]
fn dump_tournament_matrix() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("w.csv");
    let r = run(&["dump-tournament", "--input", &small(&dir), "--output", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    let rows: Vec<Vec<u32>> = text
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.len() == 6));
    assert_eq!(rows[1][0], 2);
    assert_eq!(rows[0][1], 0);
}

#[test]
fn scenario_config_file_and_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "suite.cfg",
        "# small suite\nseed = 5\nn_respondents = 40\nn_items = 6\nk1 = 3\nk2 = 3\nrestarts = 2\ndatasets = a\n",
    );
    let r = run(&[
        "scenario", "--config", cfg.to_str().unwrap(), "--datasets", "a,b", "--measures", "alpha,delta",
        "--format", "csv",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = parse_csv_rows(&r.stdout).unwrap();
    assert_eq!(rows.len(), 4 * 2 * 2);
    assert_eq!(rows[0].dataset, "ideal/a");

    let json = run(&["scenario", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    assert_eq!(json["meta"]["seed"], 5);
    assert_eq!(json["meta"]["parameters"]["n_respondents"], "40");
}

#[test]
fn bad_config_reports_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "seed = 1\nloading: 3\n");
    let r = run(&["scenario", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error[CONFIG]:"), "{}", r.stderr);
    assert!(r.stderr.contains('2'));
}

#[test]
fn no_timing_zeroes_seconds() {
    let dir = TempDir::new().unwrap();
    let r = run(&["compute", "--input", &small(&dir), "--format", "csv", "--no-timing"]);
    for row in parse_csv_rows(&r.stdout).unwrap() {
        assert_eq!(row.seconds, 0.0);
    }
    let again = run(&["compute", "--input", &small(&dir), "--format", "csv", "--no-timing"]);
    assert_eq!(r.stdout, again.stdout);
}
