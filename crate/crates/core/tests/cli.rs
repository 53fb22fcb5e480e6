use std::path::Path;
use std::process::{Command, Output};

use nonlocal::boxes::{deterministic_box, pr_box, tsirelson_box, DeterministicStrategy, Scenario};
use serde_json::Value;

fn nonlocal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonlocal"))
        .args(args)
        .env_remove("NONLOCAL_SEED")
        .output()
        .expect("binary runs")
}

fn row(report: &Value, name: &str) -> f64 {
    report["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == name)
        .unwrap_or_else(|| panic!("row {name} missing"))["computed"]
        .as_f64()
        .unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

#[test]
fn box_command_on_files() {
    let dir = tempfile::tempdir().unwrap();
    let sc = Scenario::chsh();
    let pr = write(dir.path(), "pr.json", &pr_box(&sc).unwrap().to_json_string().unwrap());
    let out = nonlocal(&["box", &pr, "--ops", "ns,fod,cf"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(row(&report, "fod"), 0.0);
    assert!(row(&report, "cf").abs() < 1e-9);

    let s = DeterministicStrategy {
        alice: vec![1, 0],
        bob: vec![0, 1],
    };
    let det = write(dir.path(), "det.json", &deterministic_box(&s, &sc).unwrap().to_json_string().unwrap());
    let report = json_stdout(&nonlocal(&["box", &det, "--ops", "cf"]));
    assert!((row(&report, "cf") - 1.0).abs() < 1e-12);

    let singlet = write(dir.path(), "singlet.json", &tsirelson_box().to_json_string().unwrap());
    let report = json_stdout(&nonlocal(&["box", &singlet, "chsh", "--ops", "bell"]));
    assert!((row(&report, "bell_value") - 2.0 * 2f64.sqrt()).abs() < 1e-6);
}

#[test]
fn malformed_box_reports_the_cell() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"scenario":{"nA":1,"nB":1,"outcomesA":[2],"outcomesB":[2]},"p":[[[[0.5,0.5],[0.5,-0.5]]]]}"#,
    );
    let out = nonlocal(&["box", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("p(1,1|0,0)"), "{stderr}");
}

#[test]
fn bounds_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("bounds.csv");
    let out = nonlocal(&["bounds", "2", "2", "2", "--format", "csv", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("name,paper_value,computed,tolerance,pass,provenance\n"));
    assert!(csv.contains("theorem_form,,3.543"));

    let unwritable = dir.path().join("missing").join("x.json");
    let out = nonlocal(&["bounds", "2", "2", "2", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_rti_is_deterministic_per_seed() {
    let args = ["verify-rti", "--trials", "30", "--dims", "2,3", "--l", "2,3", "--seed", "7"];
    let a = nonlocal(&args);
    let b = nonlocal(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_from_environment() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_nonlocal"));
        cmd.args(["bounds", "1", "1", "1"]).env_remove("NONLOCAL_SEED");
        if let Some(s) = seed {
            cmd.env("NONLOCAL_SEED", s);
        }
        json_stdout(&cmd.output().unwrap())
    };
    assert_eq!(run(Some("99"))["seed"], 99);
    assert_eq!(run(None)["seed"], 20_240_601);
}
