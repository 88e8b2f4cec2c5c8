use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contract-game"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn validate_accepts_the_reference_document() {
    let out = run(&["validate", &fixture("reference.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["valid"], true);
    assert_eq!(v["errors"], Value::Array(vec![]));
}

#[test]
fn validate_reports_every_probability_violation() {
    let out = run(&["validate", &fixture("bad_probability.json")]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["valid"], false);
    let errors = v["errors"].as_array().unwrap();
    assert_eq!(errors.len(), 2);
    assert!(errors.iter().all(|e| e["kind"] == "probability_range"));
    assert_eq!(errors[0]["index"], 1);
    assert_eq!(errors[1]["index"], 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_keys_and_truncated_json_are_parse_errors() {
    for (name, line, needle) in [
        ("unknown_key.json", 6, "utilty"),
        ("truncated.json", 1, "EOF"),
    ] {
        let out = run(&["validate", &fixture(name)]);
        assert_eq!(out.status.code(), Some(1), "{name}");
        let v = json(&out);
        let e = &v["errors"][0];
        assert_eq!(e["kind"], "parse", "{name}");
        assert_eq!(e["line"], line, "{name}");
        assert!(
            e["message"].as_str().unwrap().contains(needle),
            "{name}: {e}"
        );
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let out = run(&["solve-agent", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/definitely/not/here.json"));
}

#[test]
fn usage_errors_exit_with_two() {
    let reference = fixture("reference.json");
    for args in [
        vec!["frobnicate"],
        vec!["solve-agent"],
        vec![
            "sweep",
            reference.as_str(),
            "--points",
            "many",
            "--out",
            "-",
        ],
        vec!["sweep", reference.as_str(), "--points", "1", "--out", "-"],
        vec!["solve-agent", reference.as_str(), "--contract", "7"],
        vec!["solve-agent", reference.as_str(), "--contract", "4,x"],
        vec!["solve-game", reference.as_str(), "--tie-break", "coin_flip"],
        vec![
            "simulate",
            reference.as_str(),
            "--effort",
            "0.5",
            "--n",
            "0",
        ],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn inline_contracts_are_validated() {
    let out = run(&[
        "solve-agent",
        &fixture("invisible.json"),
        "--contract",
        "[-5,0]",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "solve-agent",
        &fixture("reference.json"),
        "--contract",
        "4,0,1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_agent_on_the_reference_case() {
    let out = run(&["solve-agent", &fixture("reference.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["contract"], serde_json::json!([4.0, 0.0]));
    let m = &v["maximizers"][0];
    assert!((m["effort"].as_f64().unwrap() - 0.5).abs() <= 1e-9);
    assert!((v["optimal_expectation"].as_f64().unwrap() - 1.3).abs() <= 1e-9);
    assert_eq!(m["kind"], "interior_critical");
    assert_eq!(v["accepted"], true);
    assert_eq!(v["risk"]["class"], "averse");
}

#[test]
fn classify_risk_prints_the_persistence_range() {
    let out = run(&[
        "classify-risk",
        &fixture("reference.json"),
        "--contract",
        "4,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["class"], "averse");
    assert_eq!(v["persistence_min"], -4.0);
    assert_eq!(v["persistence_max"], -4.0);
}

#[test]
fn solve_game_over_the_reference_grid() {
    let out = run(&["solve-game", &fixture("reference.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let sel = &v["selected"];
    assert_eq!(sel["contract"], serde_json::json!([2.0, 0.0]));
    assert!((sel["effort"].as_f64().unwrap() - 0.25).abs() <= 1e-9);
    assert!((sel["principal_payoff"].as_f64().unwrap() - 3.95).abs() <= 1e-9);
    assert!((sel["agent_payoff"].as_f64().unwrap() - 0.525).abs() <= 1e-9);
    assert_eq!(v["candidates"], 7);
    assert_eq!(v["tie_break"], "principal_favorable");

    let out = run(&[
        "solve-game",
        &fixture("three_outcomes.json"),
        "--tie-break",
        "agent-highest-effort",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["tie_break"], "agent_highest_effort");
}

#[test]
fn solve_game_reports_universal_rejection() {
    let out = run(&["solve-game", &fixture("rejected.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["all_rejected"], true);
    assert_eq!(v["selected"], Value::Null);
    assert_eq!(v["accepted_candidates"], 0);
}

#[test]
fn sweep_writes_a_csv_table() {
    let out = run(&[
        "sweep",
        &fixture("reference.json"),
        "--points",
        "5",
        "--out",
        "-",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "e,expectation,motivation,persistence");
    let mid: Vec<f64> = lines[3].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(mid[0], 0.5);
    assert!((mid[1] - 1.3).abs() <= 1e-12);
    assert_eq!(mid[2], 0.0);
    assert_eq!(mid[3], -4.0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        &fixture("reference.json"),
        "--points",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn sweep_to_an_unwritable_path_fails() {
    let out = run(&[
        "sweep",
        &fixture("reference.json"),
        "--out",
        "/no/such/dir/s.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/dir/s.csv"));
}

#[test]
fn analyze_detects_invisible_effort() {
    let out = run(&["analyze", &fixture("invisible.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let inv = &v["invisible_effort"];
    assert_eq!(inv["is_invisible"], true);
    let e = inv["effort_choice"]["minimizers"][0]["effort"]
        .as_f64()
        .unwrap();
    assert!((e - 0.3).abs() <= 1e-9);
    assert_eq!(inv["risk"]["class"], "averse");
    assert_eq!(v["two_outcome_linear"]["slope"], 0.0);
    let classical = &v["classical_assumptions"];
    assert_eq!(classical["v_increasing"]["holds"], false);
    assert_eq!(classical["u_concave"]["holds"], true);

    let out = run(&["analyze", &fixture("three_outcomes.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["two_outcome_linear"], Value::Null);
    assert!(v["two_outcome_linear_skipped"].is_string());
}

#[test]
fn simulate_records_seed_and_generator() {
    let args = [
        "simulate",
        &fixture("reference.json"),
        "--effort",
        "0.5",
        "--n",
        "20000",
        "--seed",
        "9",
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["draws"], 20000);
    assert!(v["generator"].as_str().unwrap().contains("chacha8"));
    let f = v["frequencies"].as_array().unwrap();
    assert_eq!(f.iter().map(|x| x.as_u64().unwrap()).sum::<u64>(), 20000);

    let doc_seed = json(&run(&[
        "simulate",
        &fixture("reference.json"),
        "--effort",
        "0.5",
        "--n",
        "100",
    ]));
    assert_eq!(doc_seed["seed"], 20240601);

    let out = run(&["simulate", &fixture("reference.json"), "--effort", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let reference = fixture("reference.json");
    let three = fixture("three_outcomes.json");
    for args in [
        vec!["solve-agent", reference.as_str()],
        vec!["classify-risk", three.as_str()],
        vec!["analyze", three.as_str()],
        vec!["solve-game", three.as_str()],
        vec!["sweep", three.as_str(), "--points", "33", "--out", "-"],
        vec![
            "simulate",
            three.as_str(),
            "--effort",
            "1",
            "--n",
            "50000",
            "--shards",
            "3",
        ],
    ] {
        let (a, b) = (run(&args), run(&args));
        assert_eq!(
            a.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn library_entry_point_matches_the_binary() {
    let args = ["contract-game", "solve-agent", &fixture("reference.json")];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = contract_game::cli::run(args, &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(out, run(&args[1..]).stdout);
}
