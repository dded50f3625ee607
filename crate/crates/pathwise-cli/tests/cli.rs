//! End-to-end tests of the command-line surface.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pathwise"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn pathwise");
    assert!(
        out.status.success(),
        "pathwise {:?} failed:\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("pathwise-test-{}-{}", std::process::id(), name));
    p
}

fn stat_value(stdout: &str, label: &str) -> u64 {
    stdout
        .lines()
        .find(|l| l.starts_with(label))
        .unwrap_or_else(|| panic!("missing line {label:?} in {stdout}"))
        .rsplit(':')
        .next()
        .unwrap()
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn gen_reports_grid_statistics() {
    let out = run_ok(&["gen", "--grid", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stat_value(&text, "d (number of links)"), 32);
    assert_eq!(stat_value(&text, "d0 (size of basis)"), 16);
    assert_eq!(stat_value(&text, "paths"), 56);
    assert_eq!(stat_value(&text, "minimum hops"), 5);
    assert_eq!(stat_value(&text, "maximum hops"), 8);
}

#[test]
fn gen_rejects_malformed_network_file() {
    let path = tmp("bad-net.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = bin()
        .args(["gen", "--network", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("parsing"), "stderr: {err}");
    std::fs::remove_file(&path).ok();
}

#[test]
fn gen_accepts_network_file() {
    let path = tmp("diamond.json");
    std::fs::write(
        &path,
        r#"{"nodes":4,"links":[[0,1],[0,2],[1,3],[2,3]],"source":0,"destination":3}"#,
    )
    .unwrap();
    let out = run_ok(&["gen", "--network", path.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stat_value(&text, "d (number of links)"), 4);
    assert_eq!(stat_value(&text, "paths"), 2);
    std::fs::remove_file(&path).ok();
}

#[test]
fn basis_on_parallel_links_has_unit_spanner_constant() {
    let path = tmp("parallel.json");
    std::fs::write(
        &path,
        r#"{"nodes":2,"links":[[0,1],[0,1],[0,1]],"source":0,"destination":1}"#,
    )
    .unwrap();
    let out = run_ok(&["basis", "--network", path.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("d0: 3"), "{text}");
    assert!(text.contains("S:  1"), "{text}");
    std::fs::remove_file(&path).ok();
}

#[test]
fn basis_writes_loadable_json_that_verify_accepts() {
    let basis_path = tmp("basis-grid2.json");
    run_ok(&[
        "basis",
        "--grid",
        "2",
        "--out",
        basis_path.to_str().unwrap(),
    ]);
    run_ok(&[
        "verify",
        "--grid",
        "2",
        "--basis",
        basis_path.to_str().unwrap(),
    ]);
    std::fs::remove_file(&basis_path).ok();
}

#[test]
fn verify_fails_on_corrupted_basis_file() {
    let basis_path = tmp("basis-corrupt.json");
    run_ok(&[
        "basis",
        "--grid",
        "2",
        "--out",
        basis_path.to_str().unwrap(),
    ]);
    let mut file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&basis_path).unwrap()).unwrap();
    // flip one coordinate: no longer a valid path
    file["paths"][0][0] = serde_json::json!(0);
    std::fs::write(&basis_path, serde_json::to_string(&file).unwrap()).unwrap();
    let out = bin()
        .args([
            "verify",
            "--grid",
            "2",
            "--basis",
            basis_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    std::fs::remove_file(&basis_path).ok();
}

#[test]
fn run_matches_golden_trace() {
    let out_path = tmp("golden-check.csv");
    run_ok(&[
        "run",
        "--grid",
        "2",
        "--policy",
        "ttc",
        "--T",
        "25000",
        "--R",
        "0.1",
        "--seed",
        "7",
        "--stride",
        "2500",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    let got = std::fs::read_to_string(&out_path).unwrap();
    let golden = include_str!("data/golden_run_ttc_grid2.csv");
    assert_eq!(got, golden);
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn run_with_optimal_debug_policy_has_zero_regret() {
    let out_path = tmp("optimal.csv");
    let out = run_ok(&[
        "run",
        "--grid",
        "2",
        "--policy",
        "optimal",
        "--T",
        "500",
        "--R",
        "1",
        "--seed",
        "3",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("final_cum_pseudo_regret=0 "),
        "summary: {text}"
    );
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn run_reports_ofu_not_run_on_grid8() {
    let out_path = tmp("ofu8.csv");
    let out = run_ok(&[
        "run",
        "--grid",
        "8",
        "--policy",
        "ofu",
        "--T",
        "1000",
        "--seed",
        "0",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("status=not_run:CapExceeded"), "{text}");
    // header-only trace
    let body = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(body.lines().count(), 1);
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn run_rejects_unknown_policy() {
    let out = bin()
        .args(["run", "--grid", "2", "--policy", "zigzag", "--T", "100"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn sweep_rejects_empty_policy_list() {
    let out = bin()
        .args(["sweep", "--grid", "2", "--T", "100", "--R", "1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty policy list"));
}

#[test]
fn sweep_single_iteration_has_zero_stderr() {
    let out_path = tmp("sweep1.csv");
    run_ok(&[
        "sweep",
        "--grid",
        "2",
        "--policy",
        "ttc",
        "--T",
        "500",
        "--R",
        "1",
        "--iters",
        "1",
        "--seed",
        "5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    let body = std::fs::read_to_string(&out_path).unwrap();
    let row = body.lines().nth(1).unwrap();
    let stderr_field = row.split(',').nth(7).unwrap();
    assert_eq!(stderr_field, "0");
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn sweep_accepts_config_file_and_flags_override() {
    let cfg_path = tmp("sweep-config.json");
    let out_path = tmp("sweep-config-out.csv");
    std::fs::write(
        &cfg_path,
        format!(
            r#"{{"network": {{"grid": 2}}, "policies": ["ttc"], "T": [400], "R": [1.0],
                "iterations": 2, "seed": 11, "out": "{}"}}"#,
            out_path.display()
        ),
    )
    .unwrap();
    run_ok(&["sweep", "--config", cfg_path.to_str().unwrap()]);
    let body = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(body.lines().count(), 2);
    assert!(body.lines().nth(1).unwrap().starts_with("ttc,2,8,400,1,2,"));
    std::fs::remove_file(&cfg_path).ok();
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn sweep_aggregation_matches_per_run_recomputation() {
    // the aggregate row must equal statistics recomputed from the exact
    // per-run traces the run command produces with the same seeds
    let sweep_path = tmp("agg-sweep.csv");
    run_ok(&[
        "sweep",
        "--grid",
        "2",
        "--policy",
        "mttc",
        "--T",
        "600",
        "--R",
        "0.5",
        "--iters",
        "3",
        "--seed",
        "40",
        "--out",
        sweep_path.to_str().unwrap(),
    ]);
    let body = std::fs::read_to_string(&sweep_path).unwrap();
    let row = body.lines().nth(1).unwrap();
    let mean_ta: f64 = row.split(',').nth(6).unwrap().parse().unwrap();

    let mut time_avgs = Vec::new();
    for seed in 40..43u64 {
        let out_path = tmp(&format!("agg-run-{seed}.csv"));
        let out = run_ok(&[
            "run",
            "--grid",
            "2",
            "--policy",
            "mttc",
            "--T",
            "600",
            "--R",
            "0.5",
            "--seed",
            &seed.to_string(),
            "--out",
            out_path.to_str().unwrap(),
        ]);
        let text = String::from_utf8(out.stdout).unwrap();
        let ta: f64 = text
            .split("time_avg_pseudo_regret=")
            .nth(1)
            .unwrap()
            .split_whitespace()
            .next()
            .unwrap()
            .parse()
            .unwrap();
        time_avgs.push(ta);
        std::fs::remove_file(&out_path).ok();
    }
    let recomputed = time_avgs.iter().sum::<f64>() / 3.0;
    assert!(
        (mean_ta - recomputed).abs() < 1e-12,
        "sweep {mean_ta} vs recomputed {recomputed}"
    );
    std::fs::remove_file(&sweep_path).ok();
}

#[test]
fn basis_grid6_reports_full_rank() {
    let out = run_ok(&["basis", "--grid", "6"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("d0: 36"), "{text}");
}

#[test]
fn run_reports_timeout_when_budget_is_exhausted() {
    let out_path = tmp("timeout.csv");
    let out = run_ok(&[
        "run",
        "--grid",
        "4",
        "--policy",
        "ts",
        "--T",
        "2000000",
        "--seed",
        "1",
        "--budget-secs",
        "0",
        "--stride",
        "100000",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("status=timeout@"), "{text}");
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn identical_flags_give_byte_identical_outputs() {
    let a = tmp("det-a.csv");
    let b = tmp("det-b.csv");
    for path in [&a, &b] {
        run_ok(&[
            "run",
            "--grid",
            "2",
            "--policy",
            "mttc",
            "--T",
            "3000",
            "--R",
            "1",
            "--seed",
            "99",
            "--out",
            path.to_str().unwrap(),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    std::fs::remove_file(&a).ok();
    std::fs::remove_file(&b).ok();

    // sweeps too, modulo the wall-clock runtime column
    let strip_runtime = |s: &str| -> String {
        s.lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                if f.len() >= 10 {
                    f[9] = "-";
                }
                f.join(",")
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    let sa = tmp("det-sweep-a.csv");
    let sb = tmp("det-sweep-b.csv");
    for path in [&sa, &sb] {
        run_ok(&[
            "sweep",
            "--grid",
            "2",
            "--policy",
            "ttc,ts",
            "--T",
            "800",
            "--R",
            "0.5",
            "--iters",
            "4",
            "--seed",
            "17",
            "--jobs",
            "2",
            "--out",
            path.to_str().unwrap(),
        ]);
    }
    let ba = strip_runtime(&std::fs::read_to_string(&sa).unwrap());
    let bb = strip_runtime(&std::fs::read_to_string(&sb).unwrap());
    assert_eq!(ba, bb);
    std::fs::remove_file(&sa).ok();
    std::fs::remove_file(&sb).ok();
}
