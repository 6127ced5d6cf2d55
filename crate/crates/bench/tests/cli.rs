use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn submemo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_submemo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn maximize_reports_selection_and_counters() {
    let v = json(&submemo(&[
        "maximize",
        "--function",
        "synthetic:faclocation,n=30,seed=4",
        "--k",
        "5",
    ]));
    assert_eq!(v["result"]["selected"].as_array().unwrap().len(), 5);
    assert_eq!(v["result"]["counters"]["oracle_evals"], 0);
    assert_eq!(v["mode"], "PM");
}

#[test]
fn value_oracle_mode_uses_oracle_calls_for_the_same_answer() {
    let args = [
        "maximize",
        "--function",
        "synthetic:setcover,n=25,seed=9",
        "--budget-frac",
        "0.2",
    ];
    let pm = json(&submemo(&args));
    let vo = json(&submemo(&[&args[..], &["--mode", "vo"]].concat()));
    assert_eq!(pm["result"]["selected"], vo["result"]["selected"]);
    assert!(vo["result"]["counters"]["oracle_evals"].as_u64().unwrap() > 0);
    assert_eq!(vo["result"]["counters"]["gain_evals"], 0);
}

#[test]
fn gradients_agree_across_modes_but_counters_differ() {
    let base = [
        "gradients",
        "--function",
        "synthetic:faclocation,n=8,seed=1",
        "--seed",
        "5",
    ];
    let pm = json(&submemo(&base));
    let vo = json(&submemo(&[&base[..], &["--mode", "vo"]].concat()));
    for key in ["subgradient", "supergradient_grow", "supergradient_shrink"] {
        let (a, b) = (&pm["result"][key], &vo["result"][key]);
        let wa: Vec<f64> = a["weights"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        let wb: Vec<f64> = b["weights"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        for (x, y) in wa.iter().zip(&wb) {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{}: {} vs {}", key, x, y);
        }
        assert_eq!(a["counters"]["oracle_evals"], 0);
        assert!(b["counters"]["oracle_evals"].as_u64().unwrap() > 0);
    }
    assert_eq!(vo["result"]["subgradient"]["counters"]["oracle_evals"], 8);
    assert_eq!(vo["result"]["supergradient_grow"]["counters"]["oracle_evals"], 9);
}

#[test]
fn minimize_and_constrained_subcommands_run() {
    let f = "synthetic:mixture,n=10,seed=3,modular=2";
    let v = json(&submemo(&["minimize", "--function", f]));
    assert!(v["result"]["value"].as_f64().unwrap() <= 0.0);
    for args in [
        vec![
            "scsc",
            "--function",
            "synthetic:faclocation,n=10,seed=1",
            "--g",
            "synthetic:setcover,n=10,seed=2",
            "--bound-frac",
            "0.5",
        ],
        vec![
            "scsk",
            "--function",
            "synthetic:faclocation,n=10,seed=1",
            "--g",
            "synthetic:setcover,n=10,seed=2",
            "--bound-frac",
            "0.5",
        ],
        vec![
            "ds-min",
            "--function",
            "synthetic:faclocation,n=10,seed=1",
            "--g",
            "synthetic:setcover,n=10,seed=2",
            "--variant",
            "sub-sup",
        ],
    ] {
        json(&submemo(&args));
    }
}

#[test]
fn bench_writes_csv_and_json_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = submemo(&[
        "bench",
        "--function",
        "synthetic:faclocation,n=60,seed=1",
        "--function",
        "synthetic:featurebased,n=60,seed=2",
        "--mode",
        "both",
        "--budget-frac",
        "0.05,0.1",
        "--repetitions",
        "1",
        "--report",
        "csv",
        "--out",
        out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(
        header.contains("5% PM") && header.contains("5% VO") && header.contains("5% speedup"),
        "{}",
        header
    );
    assert_eq!(csv.lines().count(), 3);
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), 2 * 2 * 2);
    assert_eq!(report["speedups"].as_array().unwrap().len(), 2 * 2);
}

#[test]
fn validate_passes_submodular_and_skips_dispersion() {
    let ok = submemo(&["validate", "--function", "synthetic:probsetcover,n=8,seed=3"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8_lossy(&ok.stdout);
    assert_eq!(text.matches("PASS").count(), 5, "{}", text);
    // Dispersion does not claim submodularity: the check is skipped, with the
    // observed violations reported.
    let disp = submemo(&["validate", "--function", "synthetic:dispersionmin,n=8,seed=3"]);
    assert_eq!(disp.status.code(), Some(0));
    let text = String::from_utf8_lossy(&disp.stdout);
    assert!(
        text.lines()
            .any(|l| l.starts_with("submodularity") && l.contains("skip")),
        "{}",
        text
    );
}

#[test]
fn exit_codes() {
    assert_eq!(submemo(&["maximize", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        submemo(&["maximize", "--function", "synthetic:nosuch,n=5", "--k", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        submemo(&["maximize", "--function", "/does/not/exist.csv", "--k", "2"])
            .status
            .code(),
        Some(2)
    );
    let stalled = submemo(&[
        "minimize",
        "--function",
        "synthetic:mixture,n=12,seed=2,modular=2",
        "--max-iterations",
        "1",
    ]);
    assert_eq!(stalled.status.code(), Some(3));
    assert_eq!(submemo(&["--help"]).status.code(), Some(0));
}

#[test]
fn loads_matrix_and_set_system_files() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("sim.csv");
    std::fs::write(&matrix, "n=3\n1,0.2,0.1\n0.2,1,0.7\n0.1,0.7,1\n").unwrap();
    let v = json(&submemo(&[
        "maximize",
        "--function",
        matrix.to_str().unwrap(),
        "--k",
        "1",
    ]));
    assert_eq!(v["result"]["value"].as_f64().unwrap(), 1.9);

    let sets = dir.path().join("sets.json");
    std::fs::write(
        &sets,
        r#"{"n": 3, "universe": 4, "weights": [1, 2, 3, 4], "sets": [[0, 1], [2], [1, 3]]}"#,
    )
    .unwrap();
    let v = json(&submemo(&[
        "maximize",
        "--function",
        sets.to_str().unwrap(),
        "--k",
        "2",
    ]));
    assert_eq!(v["class"], "set_cover");
    assert_eq!(v["result"]["value"].as_f64().unwrap(), 9.0);
    assert!(Path::new(&sets).exists());
}
