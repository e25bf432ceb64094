use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn backdoor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_backdoor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    stdout(out).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn assert_schema(name: &str, instance: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{instance}");
}

#[test]
fn table2_default_csv() {
    let text = stdout(&backdoor(&["bounds", "table2"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,log10_alphabet,log10_min_n,exponent"));
    let exponents: Vec<u64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(exponents, [369_904, 181_252, 3697, 942, 116, 9, 5, 1]);
    assert!(text.contains("CIFAR10,") && text.contains(",3697\n"));
}

#[test]
fn table2_half_alpha_json() {
    let rows = json_lines(&backdoor(&["bounds", "table2", "--alpha", "0.5", "--format", "json"]));
    assert_schema("bound_report.schema.json", &rows[0]);
    let rows = rows[0].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r["exponent"] == 0));
}

#[test]
fn table2_custom_and_missing_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cat.json");
    std::fs::write(&path, r#"[{"name": "tiny", "categorical": [10, 10, 10]}]"#).unwrap();
    let text = stdout(&backdoor(&["bounds", "table2", "--catalog", path.to_str().unwrap()]));
    assert!(text.lines().nth(1).unwrap().starts_with("tiny,3.0,0.0,0"));

    let out = backdoor(&[
        "bounds",
        "table2",
        "--catalog",
        dir.path().join("nope.json").to_str().unwrap(),
    ]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.json"));

    std::fs::write(&path, "[{]").unwrap();
    assert_eq!(
        backdoor(&["bounds", "table2", "--catalog", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn risk_with_oracle_matches() {
    let rec = &json_lines(&backdoor(&["risk", "--detector", "np", "--oracle"]))[0];
    assert_schema("risk_record.schema.json", rec);
    let exact = rec["exact"].as_f64().unwrap();
    assert!((exact - 0.34375).abs() < 1e-15);
    let r = &rec["risk"];
    let width = r["ci_high"].as_f64().unwrap() - r["ci_low"].as_f64().unwrap();
    assert!(rec["gap"].as_f64().unwrap().abs() < width);
}

#[test]
fn risk_is_deterministic_and_validated() {
    let args = [
        "risk",
        "--detector",
        "type2-tv",
        "--k",
        "4",
        "--n",
        "12",
        "--trials",
        "500",
        "--seed",
        "9",
    ];
    let a = stdout(&backdoor(&args));
    assert_eq!(a, stdout(&backdoor(&args)));
    assert_schema("risk_record.schema.json", &serde_json::from_str(a.trim()).unwrap());

    assert_eq!(backdoor(&["risk", "--trials", "99"]).status.code(), Some(2));
    assert_eq!(backdoor(&["risk", "--detector", "lr"]).status.code(), Some(2));
    assert_eq!(
        backdoor(&["risk", "--k", "10", "--n", "10", "--oracle"]).status.code(),
        Some(3)
    );
}

#[test]
fn risk_from_pair_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.json");
    std::fs::write(&path, r#"{"p0": [1.0, 0.0, 0.0], "pb": [0.0, 0.5, 0.5], "gamma": 1.0}"#).unwrap();
    let rec = &json_lines(&backdoor(&[
        "risk",
        "--pair",
        path.to_str().unwrap(),
        "--n",
        "3",
        "--trials",
        "200",
    ]))[0];
    assert_eq!(rec["risk"]["p_hat"], 0.0);
    assert_eq!(rec["k"], 3);
    std::fs::write(&path, r#"{"p0": [0.5, 0.6], "pb": [0.0, 1.0], "gamma": 1.0}"#).unwrap();
    assert_eq!(
        backdoor(&["risk", "--pair", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn toy_single_seed_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("toy.svg");
    let csv = dir.path().join("toy.csv");
    let out = backdoor(&["toy", "--svg", svg.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("normalized"));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 1);
    assert_schema("attack_report.schema.json", &lines[0]);

    let doc = std::fs::read_to_string(&svg).unwrap();
    assert!(doc.contains("<svg") && doc.contains("version=\"1.1\"") && doc.trim_end().ends_with("</svg>"));
    assert!(doc.matches("<circle").count() >= 150);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("set,index,y,z1,z2,projection,backdoored\n"));
    assert_eq!(table.lines().count(), 1 + 2 * 150);
}

#[test]
fn toy_ensemble_summary() {
    let lines = json_lines(&backdoor(&["toy", "--seeds", "100"]));
    assert_eq!(lines.len(), 101);
    let summary = lines.last().unwrap();
    assert_schema("toy_summary.schema.json", summary);
    assert!(summary["summary"]["median_p_value"].as_f64().unwrap() > 0.05);
    assert!(summary["summary"]["median_attack_success_rate"].as_f64().unwrap() > 0.9);
}

#[test]
fn toy_without_poisoning_and_bad_direction() {
    let lines = json_lines(&backdoor(&["toy", "--gamma", "0", "--seeds", "10"]));
    let rate = lines.last().unwrap()["summary"]["median_attack_success_rate"]
        .as_f64()
        .unwrap();
    assert!(rate < 0.5, "{rate}");

    let out = backdoor(&["toy", "--v", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate direction"));
}

#[test]
fn probe_reports_floor() {
    let rec = &json_lines(&backdoor(&[
        "probe", "--k", "100000", "--beta", "0.01", "--n", "20", "--gamma", "1", "--trials", "2000",
    ]))[0];
    assert_schema("probe_record.schema.json", rec);
    assert!((rec["floor"].as_f64().unwrap() - 0.3324).abs() < 1e-4);
    assert_eq!(rec["floor_check"], "pass");

    let rec = &json_lines(&backdoor(&[
        "probe",
        "--k",
        "10000",
        "--n",
        "5",
        "--detector",
        "collision",
        "--trials",
        "2000",
    ]))[0];
    assert_eq!(rec["floor_check"], "pass");

    let out = backdoor(&["probe", "--k", "1000", "--beta", "0.01", "--n", "20"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m = floor(beta * k) > n"));
}

#[test]
fn run_config_and_out_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(
        &cfg,
        r#"{"detector": "np", "pair": {"p0": [0.5, 0.5], "pb": [1.0, 0.0]},
            "n": 2, "gamma": 0.5, "beta": 0.5, "trials": 1000, "seed": 1, "flavor": "mbd"}"#,
    )
    .unwrap();
    let results = dir.path().join("results.jsonl");
    let args = [
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        results.to_str().unwrap(),
    ];
    let first = json_lines(&backdoor(&args));
    assert_schema("experiment_result.schema.json", &first[0]);

    let again = backdoor(&args);
    assert!(String::from_utf8_lossy(&again.stderr).contains("already"));
    let risk_args = ["risk", "--trials", "200", "--out", results.to_str().unwrap()];
    stdout(&backdoor(&risk_args));

    let records: Vec<Value> = std::fs::read_to_string(&results)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 2);
    for r in &records {
        assert_schema("output_record.schema.json", r);
    }
    assert_eq!(records[0]["config_hash"], first[0]["config_hash"]);
    assert!(records[0]["command"].as_str().unwrap().contains("run --config"));
    assert_schema("risk_record.schema.json", &records[1]["payload"]);

    std::fs::write(&cfg, r#"{"detector": "type2-tv", "pair": {"p0": [0.5, 0.5], "pb": [1.0, 0.0]}, "n": 2, "gamma": 0.5, "trials": 100, "flavor": "ood"}"#).unwrap();
    assert_eq!(
        backdoor(&["run", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(2)
    );
}
