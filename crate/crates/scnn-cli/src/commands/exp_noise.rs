//! `scnn exp-noise`: classification under additive Gaussian pixel noise,
//! comparing raw pixels, the linear encoder, and test-time re-learned codes
//! (optimization with the dictionary fixed, no projection dictionary).

use std::path::PathBuf;

use clap::Args;
use scnn_core::classifier::svm_predict;
use scnn_core::data::add_gaussian_noise;
use scnn_core::metrics::accuracy;
use scnn_core::model::{encode, fit, relearn_codes, ScnnModel};
use scnn_core::{Result, ScnnError, SeededRng};

use crate::commands::exp_digits::{best_svm, resolve_digit_splits, Splits};
use crate::commands::FitOpts;
use crate::csvout::{f, CsvDoc};
use crate::grid::{parse_f64_list, parse_grid, run_tasks};

#[derive(Args, Debug, Clone)]
pub struct NoiseExpArgs {
    /// small = 14x14 digits (desk scale); full = 28x28
    #[arg(long, default_value = "small")]
    pub mode: String,

    #[arg(long, requires = "input_labels")]
    pub input: Option<PathBuf>,

    #[arg(long)]
    pub input_labels: Option<PathBuf>,

    #[arg(long, requires = "test_labels")]
    pub test: Option<PathBuf>,

    #[arg(long)]
    pub test_labels: Option<PathBuf>,

    #[arg(long, conflicts_with = "input")]
    pub synthetic: bool,

    /// train,val,test row counts
    #[arg(long, default_value = "500,500,500")]
    pub split: String,

    #[arg(long, default_value_t = 400)]
    pub atoms: usize,

    #[arg(long, default_value = "0.02:0.2:10")]
    pub lambda_grid: String,

    /// Gaussian noise standard deviations
    #[arg(long, default_value = "0.02,0.04,0.06,0.08")]
    pub noise_levels: String,

    /// Iteration cap for test-time code re-learning
    #[arg(long, default_value_t = 1000)]
    pub relearn_max: usize,

    #[arg(long, default_value_t = 50)]
    pub svm_epochs: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    /// Permit runs over 5000 total digits
    #[arg(long)]
    pub allow_long: bool,

    #[command(flatten)]
    pub fit: FitOpts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRow {
    pub method: &'static str,
    pub sigma: f64,
    pub best_lambda: Option<f64>,
    pub error_rate: f64,
}

pub fn cmd_exp_noise(args: &NoiseExpArgs) -> Result<Vec<NoiseRow>> {
    let counts = {
        let parts = crate::grid::parse_usize_list(&args.split)?;
        if parts.len() != 3 || parts.iter().any(|&v| v == 0) {
            return Err(ScnnError::InvalidParam(format!(
                "--split '{}' must be three positive counts",
                args.split
            )));
        }
        (parts[0], parts[1], parts[2])
    };
    if counts.0 + counts.1 + counts.2 > 5000 && !args.allow_long {
        return Err(ScnnError::InvalidParam(
            "more than 5000 digits is a long run; pass --allow-long to confirm".into(),
        ));
    }
    let downsample = match args.mode.as_str() {
        "small" => true,
        "full" => false,
        other => {
            return Err(ScnnError::InvalidParam(format!(
                "mode '{other}' is not small|full"
            )))
        }
    };
    let sigmas = parse_f64_list(&args.noise_levels)?;
    let lambdas = parse_grid(&args.lambda_grid)?;
    let (clean, _side) = resolve_digit_splits(
        args.synthetic,
        &args.input,
        &args.input_labels,
        &args.test,
        &args.test_labels,
        counts,
        downsample,
        args.seed,
    )?;

    let mut raw_rows = Vec::new();
    let mut encode_rows = Vec::new();
    let mut relearn_rows = Vec::new();

    for (ni, &sigma) in sigmas.iter().enumerate() {
        // one noisy copy of every split per level, shared by all methods
        let noisy = Splits {
            train: scnn_core::data::LabeledDataset {
                x: add_gaussian_noise(
                    &clean.train.x,
                    sigma,
                    &mut SeededRng::new(args.seed ^ (3000 + ni as u64)),
                )?,
                labels: clean.train.labels.clone(),
            },
            val: scnn_core::data::LabeledDataset {
                x: add_gaussian_noise(
                    &clean.val.x,
                    sigma,
                    &mut SeededRng::new(args.seed ^ (4000 + ni as u64)),
                )?,
                labels: clean.val.labels.clone(),
            },
            test: scnn_core::data::LabeledDataset {
                x: add_gaussian_noise(
                    &clean.test.x,
                    sigma,
                    &mut SeededRng::new(args.seed ^ (5000 + ni as u64)),
                )?,
                labels: clean.test.labels.clone(),
            },
        };

        // raw pixels straight into the classifier
        let (raw_svm, _, _) = best_svm(
            &noisy.train.x,
            &noisy.train.labels,
            &noisy.val.x,
            &noisy.val.labels,
            args.svm_epochs,
            args.seed ^ (6000 + ni as u64),
        )?;
        let raw_acc = accuracy(&svm_predict(&raw_svm, &noisy.test.x)?, &noisy.test.labels)?;
        raw_rows.push(NoiseRow {
            method: "raw",
            sigma,
            best_lambda: None,
            error_rate: 1.0 - raw_acc,
        });

        // sparse codes: lambda selected on the validation split
        struct LambdaOut {
            model: ScnnModel,
            svm: scnn_core::classifier::LinearClassifier,
            val_accuracy: f64,
        }
        let outs: Vec<LambdaOut> = run_tasks(args.threads, &lambdas, |idx, &lambda| {
            let task_seed = args.seed ^ (ni as u64 * 10_000 + idx as u64);
            let hp = args.fit.hyperparams(lambda, args.atoms, task_seed);
            let (model, _) = fit(&noisy.train.x, &hp)?;
            let train_codes = encode(&model, &noisy.train.x, true)?;
            let val_codes = encode(&model, &noisy.val.x, true)?;
            let (svm, _, val_accuracy) = best_svm(
                &train_codes,
                &noisy.train.labels,
                &val_codes,
                &noisy.val.labels,
                args.svm_epochs,
                task_seed,
            )?;
            Ok(LambdaOut {
                model,
                svm,
                val_accuracy,
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let mut best = 0usize;
        for (i, out) in outs.iter().enumerate() {
            if out.val_accuracy > outs[best].val_accuracy {
                best = i;
            }
        }
        let chosen = &outs[best];
        let lambda = lambdas[best];

        let test_codes = encode(&chosen.model, &noisy.test.x, true)?;
        let enc_acc = accuracy(&svm_predict(&chosen.svm, &test_codes)?, &noisy.test.labels)?;
        encode_rows.push(NoiseRow {
            method: "scnn-encode",
            sigma,
            best_lambda: Some(lambda),
            error_rate: 1.0 - enc_acc,
        });

        // same dictionary and classifier, codes re-learned on the test set
        let (relearned, _) = relearn_codes(
            chosen.model.reconstruction(),
            &noisy.test.x,
            lambda,
            args.relearn_max,
            args.fit.inner_rtol,
        )?;
        let rel_acc = accuracy(&svm_predict(&chosen.svm, &relearned)?, &noisy.test.labels)?;
        relearn_rows.push(NoiseRow {
            method: "scnn-relearn",
            sigma,
            best_lambda: Some(lambda),
            error_rate: 1.0 - rel_acc,
        });
    }

    let mut rows = raw_rows;
    rows.extend(encode_rows);
    rows.extend(relearn_rows);

    let mut doc = CsvDoc::new("method,sigma,best_lambda,error_rate");
    doc.config("command", "exp-noise");
    doc.config("mode", &args.mode);
    doc.config("synthetic", args.synthetic);
    doc.config("split", &args.split);
    doc.config("atoms", args.atoms);
    doc.config("lambda_grid", &args.lambda_grid);
    doc.config("noise_levels", &args.noise_levels);
    doc.config("relearn_max", args.relearn_max);
    doc.config("svm_epochs", args.svm_epochs);
    doc.config("seed", args.seed);
    args.fit.describe(&mut doc);
    for row in &rows {
        doc.row(&[
            row.method.to_string(),
            f(row.sigma),
            row.best_lambda.map(f).unwrap_or_default(),
            f(row.error_rate),
        ]);
    }
    doc.write(&args.out)?;
    Ok(rows)
}
