//! End-to-end checks of the command-line binary: full workflows over
//! temp directories, exit codes, and the stability guarantees the file
//! formats advertise.

use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mckelm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary launches")
}

fn run_ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "mckelm {args:?} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 stdout")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn full_workflow_from_generation_to_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(
        d,
        &[
            "gen-data", "--n", "400", "--d", "5", "--c", "2", "--seed", "3", "--out",
            "train.mckd", "--test-out", "test.mckd", "--test-fraction", "0.25",
        ],
    );
    run_ok(
        d,
        &[
            "train", "--train", "train.mckd", "--out", "model.mckm", "--eta", "2", "--route-k",
            "3", "--gamma", "0.8",
        ],
    );
    run_ok(
        d,
        &["predict", "--model", "model.mckm", "--test", "test.mckd", "--out", "preds.csv"],
    );
    let preds = std::fs::read_to_string(d.join("preds.csv")).unwrap();
    let lines: Vec<&str> = preds.lines().collect();
    assert_eq!(lines[0], "row,label");
    assert_eq!(lines.len(), 101); // header + 100 test rows

    run_ok(
        d,
        &["evaluate", "--model", "model.mckm", "--test", "test.mckd", "--out", "report"],
    );
    let flat = std::fs::read_to_string(d.join("report.txt")).unwrap();
    assert!(flat.starts_with("accuracy = "), "{flat}");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    assert!(json["accuracy"].as_f64().unwrap() >= 0.95);
    assert_eq!(json["sample_count"].as_u64().unwrap(), 100);
    // A loaded model carries no training time.
    assert_eq!(json["train_seconds"].as_f64().unwrap(), 0.0);
}

#[test]
fn missing_input_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["train", "--train", "nowhere.mckd", "--out", "x.mckm"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("i/o error"));
}

#[test]
fn out_of_range_parameter_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(d, &["gen-data", "--n", "50", "--d", "3", "--out", "t.mckd"]);
    let out = run(d, &["train", "--train", "t.mckd", "--out", "x.mckm", "--eta", "99"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("out of range"));
}

#[test]
fn identical_training_runs_write_byte_identical_models() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(d, &["gen-data", "--n", "300", "--d", "4", "--c", "3", "--out", "t.mckd"]);
    for classifier in ["mckelm", "rkelm", "elm"] {
        let a = format!("{classifier}-a.mckm");
        let b = format!("{classifier}-b.mckm");
        let args = ["train", "--train", "t.mckd", "--classifier", classifier, "--eta", "1",
            "--seed", "11", "--out"];
        run_ok(d, &[&args[..], &[&a]].concat());
        run_ok(d, &[&args[..], &[&b]].concat());
        let bytes_a = std::fs::read(d.join(&a)).unwrap();
        let bytes_b = std::fs::read(d.join(&b)).unwrap();
        assert_eq!(bytes_a, bytes_b, "{classifier} runs diverged");
    }
}

#[test]
fn flags_override_config_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(d, &["gen-data", "--n", "200", "--d", "4", "--out", "t.mckd"]);
    std::fs::write(d.join("run.conf"), "eta = 2  # depth\n").unwrap();

    let from_config =
        run_ok(d, &["partition", "--train", "t.mckd", "--config", "run.conf"]);
    assert!(from_config.contains("eta: 2 (4 subsets)"), "{from_config}");

    let overridden = run_ok(
        d,
        &["partition", "--train", "t.mckd", "--config", "run.conf", "--eta", "0"],
    );
    assert!(overridden.contains("eta: 0 (1 subsets)"), "{overridden}");
    assert_eq!(overridden.matches("split ").count(), 0);
}

#[test]
fn unknown_config_key_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(d, &["gen-data", "--n", "60", "--d", "3", "--out", "t.mckd"]);
    std::fs::write(d.join("bad.conf"), "not-a-setting = 4\n").unwrap();
    let out = run(d, &["train", "--train", "t.mckd", "--out", "x.mckm", "--config", "bad.conf"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown setting"));
}

#[test]
fn partition_report_lists_every_internal_split() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(d, &["gen-data", "--n", "400", "--d", "6", "--out", "t.mckd"]);
    let report = run_ok(d, &["partition", "--train", "t.mckd", "--eta", "3"]);
    assert_eq!(report.lines().filter(|l| l.starts_with("split ")).count(), 7);
    assert_eq!(report.lines().filter(|l| l.starts_with("leaf ")).count(), 8);
    // Median splitting keeps every pair of siblings within one row.
    for line in report.lines().filter(|l| l.starts_with("leaf ")) {
        let rows: usize =
            line.split_whitespace().nth(2).unwrap().parse().expect("leaf row count");
        assert!((50 - 1..=50 + 1).contains(&rows), "{line}");
    }
}

#[test]
fn bench_prints_one_row_per_depth() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(
        d,
        &["gen-data", "--n", "300", "--d", "4", "--out", "train.mckd", "--test-out",
            "test.mckd"],
    );
    let table = run_ok(
        d,
        &["bench", "--train", "train.mckd", "--test", "test.mckd", "--etas", "0,1,2",
            "--repeats", "1"],
    );
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 4); // header + one row per depth
    assert!(lines[0].contains("subsets"));
    for (row, eta) in lines[1..].iter().zip(["0", "1", "2"]) {
        let fields: Vec<&str> = row.split_whitespace().collect();
        assert_eq!(fields.len(), 5, "{row}");
        assert_eq!(fields[0], eta);
    }
}

#[test]
fn feature_selection_flows_into_training() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // Attribution: 4 features, scores concentrated on features 2 and 0.
    std::fs::write(
        d.join("attrib.csv"),
        "0.5,0.0,0.9,0.1,0\n0.4,0.1,0.8,0.0,1\n0.6,0.0,0.7,0.1,0\n0.5,0.1,0.9,0.0,1\n",
    )
    .unwrap();
    run_ok(
        d,
        &["select-features", "--attrib", "attrib.csv", "--top-m", "2", "--out", "sel.json"],
    );
    let sel: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("sel.json")).unwrap()).unwrap();
    assert_eq!(sel["selected"][0].as_u64().unwrap(), 2);
    assert_eq!(sel["selected"][1].as_u64().unwrap(), 0);

    run_ok(d, &["gen-data", "--n", "200", "--d", "4", "--out", "t.mckd"]);
    run_ok(
        d,
        &["train", "--train", "t.mckd", "--out", "m.mckm", "--eta", "1", "--features",
            "sel.json"],
    );
    // Raw queries keep all four features; the model reduces them itself.
    let preds = run_ok(d, &["predict", "--model", "m.mckm", "--test", "t.mckd"]);
    assert_eq!(preds.lines().count(), 201);
}

#[test]
fn predict_rejects_queries_of_the_wrong_width() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(d, &["gen-data", "--n", "120", "--d", "5", "--out", "train.mckd"]);
    run_ok(d, &["gen-data", "--n", "30", "--d", "4", "--out", "narrow.mckd"]);
    run_ok(d, &["train", "--train", "train.mckd", "--out", "m.mckm", "--eta", "1"]);
    let out = run(d, &["predict", "--model", "m.mckm", "--test", "narrow.mckd"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("shape"));
}

#[test]
fn csv_and_binary_datasets_train_identical_models() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = ["gen-data", "--n", "150", "--d", "4", "--c", "2", "--seed", "9", "--out"];
    run_ok(d, &[&gen[..], &["data.csv"]].concat());
    run_ok(d, &[&gen[..], &["data.mckd"]].concat());
    run_ok(d, &["train", "--train", "data.csv", "--out", "from-csv.mckm", "--eta", "1"]);
    run_ok(d, &["train", "--train", "data.mckd", "--out", "from-bin.mckm", "--eta", "1"]);
    let a = std::fs::read(d.join("from-csv.mckm")).unwrap();
    let b = std::fs::read(d.join("from-bin.mckm")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn vote_reports_appear_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(d, &["gen-data", "--n", "200", "--d", "4", "--c", "2", "--out", "t.mckd"]);
    run_ok(
        d,
        &["train", "--train", "t.mckd", "--out", "m.mckm", "--eta", "2", "--route-k", "5"],
    );
    let with_votes =
        run_ok(d, &["predict", "--model", "m.mckm", "--test", "t.mckd", "--votes"]);
    let lines: Vec<&str> = with_votes.lines().collect();
    assert_eq!(lines[0], "row,label,votes");
    // Each vote is subset:label:distance; routed subsets join with ';'.
    assert!(lines[1].split(',').nth(2).unwrap().contains(':'), "{}", lines[1]);

    let plain = run_ok(d, &["predict", "--model", "m.mckm", "--test", "t.mckd"]);
    assert_eq!(plain.lines().next().unwrap(), "row,label");
}

#[test]
fn evaluate_needs_exactly_one_model_source() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(d, &["gen-data", "--n", "100", "--d", "3", "--out", "t.mckd"]);
    let neither = run(d, &["evaluate", "--test", "t.mckd"]);
    assert_eq!(exit_code(&neither), 1);
    run_ok(d, &["train", "--train", "t.mckd", "--out", "m.mckm", "--eta", "0"]);
    let both = run(
        d,
        &["evaluate", "--model", "m.mckm", "--train", "t.mckd", "--test", "t.mckd"],
    );
    assert_eq!(exit_code(&both), 1);
    assert!(String::from_utf8_lossy(&both.stderr).contains("exactly one"));
}

#[test]
fn evaluate_can_train_in_process_and_times_it() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(
        d,
        &["gen-data", "--n", "300", "--d", "4", "--out", "train.mckd", "--test-out",
            "test.mckd"],
    );
    let flat = run_ok(
        d,
        &["evaluate", "--train", "train.mckd", "--test", "test.mckd", "--eta", "1",
            "--classifier", "kelm"],
    );
    let train_line = flat
        .lines()
        .find(|l| l.starts_with("train_seconds = "))
        .expect("report includes training time");
    let seconds: f64 = train_line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(seconds > 0.0);
}
