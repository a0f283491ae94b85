//! In-process runs of the experiment runners on small configurations,
//! checking behavior that the CSV-level smoke tests cannot see.

use scnn_cli::commands::exp_digits::{cmd_exp_digits, DigitsExpArgs};
use scnn_cli::commands::exp_noise::{cmd_exp_noise, NoiseExpArgs};
use scnn_cli::commands::exp_pca::{cmd_exp_pca, PcaExpArgs};
use scnn_cli::commands::FitOpts;

fn fit_opts(tmax: usize, u: usize, d: usize, c: usize, rtol: f64) -> FitOpts {
    FitOpts {
        tmax,
        inner_u_max: u,
        inner_d_max: d,
        inner_c_max: c,
        rtol,
        ..FitOpts::default()
    }
}

#[test]
fn exp_pca_full_rank_drives_both_errors_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let args = PcaExpArgs {
        input: None,
        synthetic_images: 3,
        image_size: 32,
        patches: 80,
        side: 4, // p = 16
        components: "16".into(),
        repeats: 1,
        seed: 2,
        out: dir.path().join("pca.csv"),
        threads: 2,
        fit: fit_opts(60, 400, 200, 200, 1e-9),
    };
    let rows = cmd_exp_pca(&args).unwrap();
    let pca = rows.iter().find(|r| r.method == "pca").unwrap();
    let scnn = rows.iter().find(|r| r.method == "scnn").unwrap();
    // k = p: PCA reconstructs exactly; the network gets very close
    assert!(pca.rms_mean < 1e-10, "pca rms {}", pca.rms_mean);
    assert!(scnn.rms_mean < 0.01, "network rms {}", scnn.rms_mean);
    // PCA rows in the CSV carry zero std
    assert_eq!(pca.rms_std, 0.0);
}

#[test]
fn exp_digits_degenerate_lambda_collapses_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    // a single-point grid at a lambda large enough to kill every code
    let args = DigitsExpArgs {
        mode: "small".into(),
        input: None,
        input_labels: None,
        test: None,
        test_labels: None,
        synthetic: true,
        split: Some("100,100,100".into()),
        atoms: Some("16".into()),
        lambda_grid: Some("5:5:1".into()),
        svm_epochs: 10,
        seed: 4,
        out: dir.path().join("digits.csv"),
        threads: 2,
        allow_long: false,
        timings: false,
        fit: fit_opts(4, 40, 25, 25, 1e-4),
    };
    let result = cmd_exp_digits(&args).unwrap();
    let row = &result.selected[0];
    // near-zero codes: sparsity area close to 1, accuracy near the 0.1
    // class prior
    assert!(
        row.sparsity_area > 0.95,
        "expected nearly empty codes, sparsity area {}",
        row.sparsity_area
    );
    assert!(
        row.val_accuracy <= 0.25,
        "accuracy {} did not collapse toward the class prior",
        row.val_accuracy
    );
}

#[test]
fn exp_noise_sigma_zero_matches_exp_digits() {
    let dir = tempfile::tempdir().unwrap();
    let fit = fit_opts(4, 40, 25, 25, 1e-4);

    let digits_args = DigitsExpArgs {
        mode: "small".into(),
        input: None,
        input_labels: None,
        test: None,
        test_labels: None,
        synthetic: true,
        split: Some("100,100,100".into()),
        atoms: Some("12".into()),
        lambda_grid: Some("0.05:0.2:2".into()),
        svm_epochs: 10,
        seed: 6,
        out: dir.path().join("digits.csv"),
        threads: 2,
        allow_long: false,
        timings: false,
        fit: fit.clone(),
    };
    let digits = cmd_exp_digits(&digits_args).unwrap();
    let digit_row = &digits.selected[0];

    let noise_args = NoiseExpArgs {
        mode: "small".into(),
        input: None,
        input_labels: None,
        test: None,
        test_labels: None,
        synthetic: true,
        split: "100,100,100".into(),
        atoms: 12,
        lambda_grid: "0.05:0.2:2".into(),
        noise_levels: "0".into(),
        relearn_max: 100,
        svm_epochs: 10,
        seed: 6,
        out: dir.path().join("noise.csv"),
        threads: 2,
        allow_long: false,
        fit,
    };
    let noise = cmd_exp_noise(&noise_args).unwrap();
    let encode_row = noise.iter().find(|r| r.method == "scnn-encode").unwrap();

    // sigma = 0 noise is the identity, so the sparse-code pipeline must
    // reproduce the digit experiment's selected row exactly
    assert_eq!(encode_row.best_lambda.unwrap(), digit_row.lambda);
    assert_eq!(encode_row.error_rate, digit_row.error_rate);

    // both CSVs embed their resolved configuration as comments
    for name in ["digits.csv", "noise.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.starts_with("# command="), "{name} lacks config header");
        assert!(text.contains("# seed=6"), "{name} lacks seed echo");
    }
}
