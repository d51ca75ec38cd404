//! End-to-end tests of the `bench` binary: subcommands, file formats, and
//! exit codes.

use std::path::Path;
use std::process::Command;

use abal_bench::report::parse_csv_str;

fn bench_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bench"))
}

#[test]
fn gen_then_solve_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let scenario_path = dir.path().join("scenario.json");

    let out = bench_cmd()
        .args([
            "gen",
            "--seed",
            "3",
            "--n",
            "6",
            "--k",
            "2",
            "--out",
            scenario_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "gen failed: {out:?}");
    assert!(scenario_path.exists());

    let out = bench_cmd()
        .args([
            "solve",
            "--scenario",
            scenario_path.to_str().unwrap(),
            "--algo",
            "abal",
            "--eps",
            "1e-3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "solve failed: {out:?}");
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["algorithm"], "abal");
    assert_eq!(json["n"], 6);
    assert!(json["certificate"]["satisfied"].as_bool().unwrap());
    assert!(json["objective"].as_f64().unwrap() > 0.0);
    // W: K+1 blocks of N×N [re, im] pairs.
    assert_eq!(json["w"].as_array().unwrap().len(), 3);
    assert_eq!(json["z"].as_array().unwrap().len(), 6);
    assert_eq!(json["z"][0].as_array().unwrap().len(), 6);
    assert_eq!(json["z"][0][0].as_array().unwrap().len(), 2);
}

#[test]
fn run_emits_reports_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    // TF-PDHG is expected to miss the tiny budget, driving exit code 2.
    std::fs::write(
        &config_path,
        r#"{
            "grid": [[4, 2]],
            "seeds": 2,
            "algorithms": ["abal", "tfpdhg"],
            "max_iter": 60,
            "reference_anchor": false
        }"#,
    )
    .unwrap();

    let out_dir = dir.path().join("out");
    let out = bench_cmd()
        .args([
            "run",
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "expected run failures: {out:?}");

    let csv_text = std::fs::read_to_string(out_dir.join("bench_rows.csv")).unwrap();
    let rows = parse_csv_str(&csv_text).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().any(|r| !r.solved));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("bench_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["config"]["seeds"], 2);
    assert_eq!(report["rows"].as_array().unwrap().len(), 4);
    assert!(report["cells"].as_array().unwrap().len() >= 2);

    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("--"), "unsolved cells render --: {table}");
}

#[test]
fn usage_errors_exit_one() {
    // Unknown flag.
    let out = bench_cmd().args(["run", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // Missing config file.
    let out = bench_cmd()
        .args(["run", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // Invalid config contents.
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.json");
    std::fs::write(&config_path, r#"{"grid": []}"#).unwrap();
    let out = bench_cmd()
        .args(["run", "--config", config_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_is_deterministic_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = bench_cmd()
            .args([
                "gen", "--seed", "5", "--n", "4", "--k", "2", "--out",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    assert_eq!(read(&a), read(&b));
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap()
}
