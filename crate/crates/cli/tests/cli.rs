use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adsb-hqnn"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SMALL: &[&str] = &[
    "--dataset",
    "synthetic",
    "--attack-samples",
    "30",
    "--qubits",
    "2",
    "--layers",
    "1",
    "--epochs",
    "2",
    "--batch-size",
    "32",
    "--seed",
    "4",
];

/// Rows whose eight fields are pairwise weakly correlated, so feature
/// selection keeps seven columns.
fn write_uncorrelated_csv(path: &Path, rows: usize) {
    let mut s = String::from("time,icao24,lat,lon,velocity,heading,baroAltitude,geoAltitude,label\n");
    for i in 0..rows {
        let x = i as f64;
        let _ = writeln!(
            s,
            "{},{:06x},{},{},{},{},{},{},{}",
            1_600_000_000.0 + (x * 7.3).sin() * 1e4,
            0xa00000 + i,
            40.0 + (x * 1.7).sin(),
            -75.0 + (x * 2.9).cos(),
            200.0 + 30.0 * (x * 0.61).sin(),
            (x * 37.0) % 360.0,
            9000.0 + 500.0 * (x * 1.13).cos(),
            9000.0 + 500.0 * (x * 3.77).sin(),
            u8::from(i % 3 == 0)
        );
    }
    std::fs::write(path, s).unwrap();
}

#[test]
fn train_writes_report_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let mut args = vec!["train", "--model", "fnn", "--out", out_dir.to_str().unwrap()];
    args.extend_from_slice(SMALL);
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("accuracy"), "{stdout}");
    for f in ["report.json", "report.txt", "checkpoint.json"] {
        assert!(out_dir.join(f).is_file(), "missing {f}");
    }

    let ck = out_dir.join("checkpoint.json");
    let ok = run(&["eval", "--checkpoint", ck.to_str().unwrap()]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));

    let wrong = run(&["eval", "--checkpoint", ck.to_str().unwrap(), "--model", "hfqnn"]);
    assert_eq!(code(&wrong), 1);
    assert!(stderr(&wrong).contains("expected hfqnn"), "{}", stderr(&wrong));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "model = \"fnn\"\nepochs = 1\nattack_samples = 30\nqubits = 2\n").unwrap();
    let out_dir = dir.path().join("run");
    let out = run(&[
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--epochs",
        "3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = std::fs::read_to_string(out_dir.join("report.json")).unwrap();
    assert!(report.contains("\"epochs\": 3"));
    assert!(report.contains("\"model\": \"fnn\""));
}

#[test]
fn config_errors_exit_with_one() {
    assert_eq!(code(&run(&["train", "--dataset", "/no/such.csv"])), 1);
    assert_eq!(code(&run(&["train", "--model", "rnn"])), 1);
    assert_eq!(code(&run(&["train", "--lr", "-1"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn data_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    std::fs::write(&csv, "time,icao24,lat,lon,velocity,heading,baroaltitude,label\n1,a,1,1,1,1,1,0\n").unwrap();
    let out = run(&["train", "--dataset", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("geoaltitude"), "{}", stderr(&out));
}

#[test]
fn eval_with_other_feature_count_names_both() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("wide.csv");
    write_uncorrelated_csv(&csv, 150);
    let out_dir = dir.path().join("run");
    let out = run(&[
        "train",
        "--dataset",
        csv.to_str().unwrap(),
        "--model",
        "fnn",
        "--attack-samples",
        "40",
        "--qubits",
        "2",
        "--epochs",
        "1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let ck = out_dir.join("checkpoint.json");
    let eval = run(&["eval", "--checkpoint", ck.to_str().unwrap(), "--dataset", "synthetic"]);
    assert_eq!(code(&eval), 2);
    let msg = stderr(&eval);
    assert!(msg.contains("expects 7 features, dataset provides 6"), "{msg}");
}

#[test]
fn grid_prints_table_and_flags_failures() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("grid.toml");
    std::fs::write(
        &spec,
        "[base]\nepochs = 1\nqubits = 2\nlayers = 1\n[axes]\nmodel = [\"fnn\", \"hfqnn\"]\nattack_samples = [20, 30]\n",
    )
    .unwrap();
    let out_dir = dir.path().join("grid");
    let out = run(&["grid", spec.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let table = String::from_utf8_lossy(&out.stdout);
    assert_eq!(table.lines().count(), 6, "{table}");
    assert!(table.lines().next().unwrap().starts_with("Model"));
    assert!(out_dir.join("series_attack_samples.csv").is_file());

    std::fs::write(&spec, "[base]\nepochs = 1\nratio = 1.0\n[axes]\nattack_samples = [2]\n").unwrap();
    let failed = run(&["grid", spec.to_str().unwrap()]);
    assert_eq!(code(&failed), 2);
    assert!(stderr(&failed).contains("1 grid cell(s) failed"));

    std::fs::write(&spec, "[axes]\nseed = []\n").unwrap();
    assert_eq!(code(&run(&["grid", spec.to_str().unwrap()])), 1);
}
