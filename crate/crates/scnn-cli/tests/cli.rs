//! End-to-end runs of the `scnn` binary: exit codes, file outputs,
//! determinism, and cross-command consistency.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use scnn_core::data::{load_idx, load_matrix, load_model};
use scnn_core::model::{encode, soft_threshold};

fn scnn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scnn"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn scnn");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn gen_patches(dir: &Path, name: &str, count: usize, seed: u64) -> PathBuf {
    let path = dir.join(name);
    run_ok(scnn().args([
        "gen-patches",
        "--synthetic-images",
        "4",
        "--image-size",
        "48",
        "--count",
        &count.to_string(),
        "--side",
        "8",
        "--seed",
        &seed.to_string(),
        "--center",
        "--out",
        path.to_str().unwrap(),
    ]));
    path
}

fn train_small(dir: &Path, input: &Path, model_name: &str, report: Option<&str>) -> PathBuf {
    let model = dir.join(model_name);
    let mut cmd = scnn();
    cmd.args([
        "train",
        "--input",
        input.to_str().unwrap(),
        "--atoms",
        "12",
        "--lambda",
        "0.05",
        "--seed",
        "3",
        "--tmax",
        "6",
        "--inner-u-max",
        "60",
        "--inner-d-max",
        "40",
        "--inner-c-max",
        "40",
        "--out",
        model.to_str().unwrap(),
    ]);
    if let Some(r) = report {
        let report_path = dir.join(r);
        cmd.args(["--report", report_path.to_str().unwrap()]);
    }
    run_ok(&mut cmd);
    model
}

#[test]
fn train_smoke_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_patches(dir.path(), "train.scnm", 80, 1);
    let m1 = train_small(dir.path(), &input, "a.scnn", None);
    let m2 = train_small(dir.path(), &input, "b.scnn", None);
    let b1 = std::fs::read(&m1).unwrap();
    let b2 = std::fs::read(&m2).unwrap();
    assert!(!b1.is_empty());
    assert_eq!(b1, b2, "identical invocations must write identical models");
}

#[test]
fn missing_required_flag_exits_2() {
    let out = scnn()
        .args(["train", "--atoms", "4", "--lambda", "0.1", "--out", "x"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_2() {
    let out = scnn().args(["encode", "--nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_file_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = scnn()
        .args([
            "train",
            "--input",
            dir.path().join("nope.scnm").to_str().unwrap(),
            "--atoms",
            "4",
            "--lambda",
            "0.1",
            "--out",
            dir.path().join("m.scnn").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn model_data_dimension_mismatch_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_patches(dir.path(), "train.scnm", 40, 2);
    let model = train_small(dir.path(), &input, "m.scnn", None);
    // 4x4 patches do not fit an 8x8 model
    let other = dir.path().join("other.scnm");
    run_ok(scnn().args([
        "gen-patches",
        "--synthetic-images",
        "2",
        "--image-size",
        "32",
        "--count",
        "10",
        "--side",
        "4",
        "--seed",
        "9",
        "--out",
        other.to_str().unwrap(),
    ]));
    let out = scnn()
        .args([
            "encode",
            "--model",
            model.to_str().unwrap(),
            "--input",
            other.to_str().unwrap(),
            "--out",
            dir.path().join("codes.csv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reconstruct_matches_trained_feedforward_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_patches(dir.path(), "train.scnm", 60, 4);
    let model = train_small(dir.path(), &input, "m.scnn", Some("report.csv"));

    let rec_path = dir.path().join("rec.scnm");
    run_ok(scnn().args([
        "reconstruct",
        "--model",
        model.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "--no-threshold",
        "--binary",
        "--out",
        rec_path.to_str().unwrap(),
    ]));

    let report = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let last = report
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("step"))
        .last()
        .unwrap();
    let logged: f64 = last.split(',').nth(4).unwrap().parse().unwrap();

    let x = load_matrix(&input).unwrap();
    let rec = load_matrix(&rec_path).unwrap();
    let p = x.cols() as f64;
    let recomputed = x.sub(&rec).unwrap().sq_sum() / p;
    assert!(
        (recomputed - logged).abs() < 1e-10 * logged.max(1.0),
        "feed-forward error mismatch: report {logged}, files {recomputed}"
    );
}

#[test]
fn no_threshold_changes_support_only_in_dead_zone() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_patches(dir.path(), "train.scnm", 50, 5);
    let model_path = train_small(dir.path(), &input, "m.scnn", None);

    let raw = dir.path().join("raw.scnm");
    run_ok(scnn().args([
        "encode",
        "--model",
        model_path.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "--no-threshold",
        "--binary",
        "--out",
        raw.to_str().unwrap(),
    ]));
    let thresholded = dir.path().join("thr.scnm");
    run_ok(scnn().args([
        "encode",
        "--model",
        model_path.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "--binary",
        "--out",
        thresholded.to_str().unwrap(),
    ]));

    let model = load_model(&model_path).unwrap();
    let lambda = model.lambda();
    let raw = load_matrix(&raw).unwrap();
    let thr = load_matrix(&thresholded).unwrap();
    for (&v, &t) in raw.data().iter().zip(thr.data()) {
        assert_eq!(t, soft_threshold(v, lambda));
        // support differs only where the unthresholded value was inside
        // the dead zone
        if v.abs() > lambda {
            assert!(t != 0.0 || v == 0.0);
        } else {
            assert_eq!(t, 0.0);
        }
    }
    // sanity: the model actually has a dead zone
    assert!(raw.data().iter().any(|v| v.abs() <= lambda && *v != 0.0));

    // in-process encode agrees with the CLI output bitwise
    let x = load_matrix(&input).unwrap();
    assert_eq!(encode(&model, &x, false).unwrap(), raw);
}

#[test]
fn gen_digits_writes_parseable_idx() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("digits.idx3");
    let labels = dir.path().join("digits.idx1");
    run_ok(scnn().args([
        "gen-digits",
        "--count",
        "30",
        "--seed",
        "8",
        "--out-images",
        images.to_str().unwrap(),
        "--out-labels",
        labels.to_str().unwrap(),
    ]));
    let ds = load_idx(&images, &labels).unwrap();
    assert_eq!(ds.x.rows(), 30);
    assert_eq!(ds.x.cols(), 784);
    assert_eq!(&ds.labels[..10], &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]);
}

#[test]
fn exp_missing_smoke_all_methods() {
    let dir = tempfile::tempdir().unwrap();
    let train = gen_patches(dir.path(), "train.scnm", 60, 21);
    let val = gen_patches(dir.path(), "val.scnm", 40, 22);
    let test = gen_patches(dir.path(), "test.scnm", 40, 23);
    let out = dir.path().join("missing.csv");
    run_ok(scnn().args([
        "exp-missing",
        "--input",
        train.to_str().unwrap(),
        "--val",
        val.to_str().unwrap(),
        "--test",
        test.to_str().unwrap(),
        "--atoms",
        "12",
        "--lambda-grid",
        "0.01:1:3",
        "--sparsenet-lambda-grid",
        "0.01:20:3",
        "--noise-levels",
        "0,0.3",
        "--seed",
        "2",
        "--threads",
        "2",
        "--tmax",
        "5",
        "--inner-u-max",
        "50",
        "--inner-d-max",
        "30",
        "--inner-c-max",
        "30",
        "--sparsenet-outer-max",
        "8",
        "--sparsenet-inner-max",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]));
    let csv = std::fs::read_to_string(&out).unwrap();
    let data_rows: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("method"))
        .collect();
    // 3 methods x 2 noise levels
    assert_eq!(data_rows.len(), 6);
    for method in ["scnn", "sparsenet", "pca"] {
        assert!(data_rows.iter().any(|r| r.starts_with(method)));
    }
    // pca rows leave best_lambda empty
    let pca_row = data_rows.iter().find(|r| r.starts_with("pca")).unwrap();
    assert_eq!(pca_row.split(',').nth(2).unwrap(), "");
}

#[test]
fn exp_digits_full_mode_requires_allow_long() {
    let dir = tempfile::tempdir().unwrap();
    let out = scnn()
        .args([
            "exp-digits",
            "--mode",
            "full",
            "--synthetic",
            "--out",
            dir.path().join("d.csv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("--allow-long"), "{msg}");
}

#[test]
fn exp_noise_smoke_with_sigma_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("noise.csv");
    run_ok(scnn().args([
        "exp-noise",
        "--synthetic",
        "--split",
        "60,60,60",
        "--atoms",
        "12",
        "--lambda-grid",
        "0.05:0.2:2",
        "--noise-levels",
        "0,0.05",
        "--relearn-max",
        "120",
        "--svm-epochs",
        "12",
        "--seed",
        "3",
        "--threads",
        "2",
        "--tmax",
        "4",
        "--inner-u-max",
        "40",
        "--inner-d-max",
        "25",
        "--inner-c-max",
        "25",
        "--out",
        out.to_str().unwrap(),
    ]));
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("method"))
        .collect();
    assert_eq!(rows.len(), 6); // 3 methods x 2 sigmas
    for method in ["raw", "scnn-encode", "scnn-relearn"] {
        assert_eq!(rows.iter().filter(|r| r.starts_with(method)).count(), 2);
    }
    // error rates are valid fractions
    for row in rows {
        let err: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&err), "{row}");
    }
}
