//! `scnn exp-digits`: unsupervised sparse codes feeding a linear
//! classifier. "small" mode downsamples digits to 14×14 and sweeps small
//! atom counts; "full" mode keeps 28×28 and the large-dictionary protocol
//! and is gated behind --allow-long.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use scnn_core::classifier::{svm_fit, svm_predict, LinearClassifier};
use scnn_core::data::{downsample_rows, gen_digit_dataset, load_idx, remap_pixels, LabeledDataset};
use scnn_core::metrics::{accuracy, sparsity_area, sparsity_area_raw, sparsity_curve};
use scnn_core::model::{encode, fit};
use scnn_core::{Matrix, Result, ScnnError, SeededRng};

use crate::commands::{mean, FitOpts};
use crate::csvout::{f, secs, CsvDoc};
use crate::grid::{parse_grid, parse_usize_list, run_tasks};

/// Regularization strengths tried on the validation split.
pub const SVM_REGS: [f64; 3] = [1e-4, 1e-3, 1e-2];

#[derive(Args, Debug, Clone)]
pub struct DigitsExpArgs {
    /// small = 14x14 digits, desk-scale grids; full = 28x28, full-protocol grids
    #[arg(long, default_value = "small")]
    pub mode: String,

    /// IDX image file holding the train (and, absent --test, val+test) rows
    #[arg(long, requires = "input_labels")]
    pub input: Option<PathBuf>,

    #[arg(long)]
    pub input_labels: Option<PathBuf>,

    /// Optional separate IDX pair for the test split
    #[arg(long, requires = "test_labels")]
    pub test: Option<PathBuf>,

    #[arg(long)]
    pub test_labels: Option<PathBuf>,

    /// Generate synthetic digits instead of reading IDX files
    #[arg(long, conflicts_with = "input")]
    pub synthetic: bool,

    /// train,val,test row counts (defaults per mode)
    #[arg(long)]
    pub split: Option<String>,

    /// Atom counts to sweep (defaults per mode)
    #[arg(long)]
    pub atoms: Option<String>,

    /// Sparsity-weight grid lo:hi:n (defaults per mode)
    #[arg(long)]
    pub lambda_grid: Option<String>,

    #[arg(long, default_value_t = 50)]
    pub svm_epochs: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    /// Permit the long full-scale run
    #[arg(long)]
    pub allow_long: bool,

    /// Emit measured wall-clock times instead of fixed zeros
    #[arg(long)]
    pub timings: bool,

    #[command(flatten)]
    pub fit: FitOpts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DigitsGridRow {
    pub atoms: usize,
    pub lambda: f64,
    pub reg: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DigitsSelectedRow {
    pub atoms: usize,
    pub lambda: f64,
    pub reg: f64,
    pub val_accuracy: f64,
    pub test_accuracy: f64,
    pub error_rate: f64,
    pub sparsity_area: f64,
    pub sparsity_area_raw: f64,
    pub learn_seconds: f64,
    pub val_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct DigitsResult {
    pub grid: Vec<DigitsGridRow>,
    pub selected: Vec<DigitsSelectedRow>,
}

pub struct Splits {
    pub train: LabeledDataset,
    pub val: LabeledDataset,
    pub test: LabeledDataset,
}

fn parse_split(
    args_split: &Option<String>,
    default: (usize, usize, usize),
) -> Result<(usize, usize, usize)> {
    match args_split {
        None => Ok(default),
        Some(spec) => {
            let parts = parse_usize_list(spec)?;
            if parts.len() != 3 || parts.iter().any(|&v| v == 0) {
                return Err(ScnnError::InvalidParam(format!(
                    "--split '{spec}' must be three positive counts"
                )));
            }
            Ok((parts[0], parts[1], parts[2]))
        }
    }
}

/// Loads or synthesizes digits, slices the three splits, optionally
/// downsamples to 14×14, and remaps each split's pixel range to [-1, 1].
pub fn resolve_digit_splits(
    synthetic: bool,
    input: &Option<PathBuf>,
    input_labels: &Option<PathBuf>,
    test: &Option<PathBuf>,
    test_labels: &Option<PathBuf>,
    counts: (usize, usize, usize),
    downsample: bool,
    seed: u64,
) -> Result<(Splits, usize)> {
    let (n_train, n_val, n_test) = counts;
    let (train, val, test) = if synthetic {
        let mut rng = SeededRng::new(seed ^ 0xD161);
        let ds = gen_digit_dataset(n_train + n_val + n_test, &mut rng);
        (
            ds.slice(0, n_train),
            ds.slice(n_train, n_val),
            ds.slice(n_train + n_val, n_test),
        )
    } else {
        let (Some(images), Some(labels)) = (input, input_labels) else {
            return Err(ScnnError::InvalidParam(
                "pass --input/--input-labels or --synthetic".into(),
            ));
        };
        let ds = load_idx(images, labels)?;
        let needed = if test.is_some() {
            n_train + n_val
        } else {
            n_train + n_val + n_test
        };
        if ds.x.rows() < needed {
            return Err(ScnnError::InvalidParam(format!(
                "input has {} rows, split needs {needed}",
                ds.x.rows()
            )));
        }
        let test_ds = match (test, test_labels) {
            (Some(ti), Some(tl)) => {
                let t = load_idx(ti, tl)?;
                if t.x.rows() < n_test {
                    return Err(ScnnError::InvalidParam(format!(
                        "test input has {} rows, split needs {n_test}",
                        t.x.rows()
                    )));
                }
                t.slice(0, n_test)
            }
            _ => ds.slice(n_train + n_val, n_test),
        };
        (ds.slice(0, n_train), ds.slice(n_train, n_val), test_ds)
    };

    let p = train.x.cols();
    let side = (p as f64).sqrt() as usize;
    if side * side != p {
        return Err(ScnnError::InvalidParam(format!(
            "digit rows of length {p} are not square images"
        )));
    }
    let prep = |ds: LabeledDataset| -> Result<(LabeledDataset, usize)> {
        let (x, out_side) = if downsample {
            (downsample_rows(&ds.x, side, 2)?, side / 2)
        } else {
            (ds.x, side)
        };
        let (x, _) = remap_pixels(&x, -1.0, 1.0);
        Ok((
            LabeledDataset {
                x,
                labels: ds.labels,
            },
            out_side,
        ))
    };
    let (train, out_side) = prep(train)?;
    let (val, _) = prep(val)?;
    let (test, _) = prep(test)?;
    Ok((Splits { train, val, test }, out_side))
}

/// Trains the reg grid on the training codes and keeps the classifier with
/// the best validation accuracy (ties toward smaller reg).
pub fn best_svm(
    train_codes: &Matrix,
    train_labels: &[u8],
    val_codes: &Matrix,
    val_labels: &[u8],
    epochs: usize,
    seed: u64,
) -> Result<(LinearClassifier, f64, f64)> {
    let mut best: Option<(LinearClassifier, f64, f64)> = None;
    for &reg in &SVM_REGS {
        let (model, _) = svm_fit(train_codes, train_labels, 10, reg, epochs, seed)?;
        let acc = accuracy(&svm_predict(&model, val_codes)?, val_labels)?;
        if best.as_ref().map_or(true, |(_, _, b)| acc > *b) {
            best = Some((model, reg, acc));
        }
    }
    Ok(best.expect("non-empty reg grid"))
}

struct TaskOut {
    lambda: f64,
    reg: f64,
    val_accuracy: f64,
    test_accuracy: f64,
    error_rate: f64,
    sparsity_area: f64,
    sparsity_area_raw: f64,
    learn_seconds: f64,
    val_seconds: f64,
}

pub fn cmd_exp_digits(args: &DigitsExpArgs) -> Result<DigitsResult> {
    let (default_split, default_atoms, default_grid, downsample) = match args.mode.as_str() {
        "small" => ((500, 500, 500), "25,50,75,100,125,150", "0.01:1:40", true),
        "full" => (
            (50000, 10000, 10000),
            "400,800,1200,1600",
            "0.02:0.2:10",
            false,
        ),
        other => {
            return Err(ScnnError::InvalidParam(format!(
                "mode '{other}' is not small|full"
            )))
        }
    };
    if args.mode == "full" && !args.allow_long {
        return Err(ScnnError::InvalidParam(
            "full mode is a long run; pass --allow-long to confirm".into(),
        ));
    }
    let counts = parse_split(&args.split, default_split)?;
    let atoms_list = parse_usize_list(args.atoms.as_deref().unwrap_or(default_atoms))?;
    let lambdas = parse_grid(args.lambda_grid.as_deref().unwrap_or(default_grid))?;
    let (splits, side) = resolve_digit_splits(
        args.synthetic,
        &args.input,
        &args.input_labels,
        &args.test,
        &args.test_labels,
        counts,
        downsample,
        args.seed,
    )?;

    let tasks: Vec<(usize, f64)> = atoms_list
        .iter()
        .flat_map(|&a| lambdas.iter().map(move |&l| (a, l)))
        .collect();
    let outs: Vec<TaskOut> = run_tasks(args.threads, &tasks, |idx, &(atoms, lambda)| {
        let task_seed = args.seed ^ idx as u64;
        let t0 = Instant::now();
        let hp = args.fit.hyperparams(lambda, atoms, task_seed);
        let (model, _) = fit(&splits.train.x, &hp)?;
        let learn_seconds = t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        let train_codes = encode(&model, &splits.train.x, true)?;
        let val_codes = encode(&model, &splits.val.x, true)?;
        let (svm, reg, val_accuracy) = best_svm(
            &train_codes,
            &splits.train.labels,
            &val_codes,
            &splits.val.labels,
            args.svm_epochs,
            task_seed,
        )?;
        let val_seconds = t1.elapsed().as_secs_f64();

        let test_codes = encode(&model, &splits.test.x, true)?;
        let test_accuracy = accuracy(&svm_predict(&svm, &test_codes)?, &splits.test.labels)?;
        let curve = sparsity_curve(&test_codes, 11);
        Ok(TaskOut {
            lambda,
            reg,
            val_accuracy,
            test_accuracy,
            error_rate: 1.0 - test_accuracy,
            sparsity_area: sparsity_area(&curve)?,
            sparsity_area_raw: sparsity_area_raw(&curve)?,
            learn_seconds,
            val_seconds,
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut grid = Vec::new();
    let mut selected = Vec::new();
    for (ai, &atoms) in atoms_list.iter().enumerate() {
        let block = &outs[ai * lambdas.len()..(ai + 1) * lambdas.len()];
        let mut best = 0usize;
        for (i, out) in block.iter().enumerate() {
            grid.push(DigitsGridRow {
                atoms,
                lambda: out.lambda,
                reg: out.reg,
                val_accuracy: out.val_accuracy,
            });
            if out.val_accuracy > block[best].val_accuracy {
                best = i;
            }
        }
        let chosen = &block[best];
        let learn: Vec<f64> = block.iter().map(|o| o.learn_seconds).collect();
        let val: Vec<f64> = block.iter().map(|o| o.val_seconds).collect();
        selected.push(DigitsSelectedRow {
            atoms,
            lambda: chosen.lambda,
            reg: chosen.reg,
            val_accuracy: chosen.val_accuracy,
            test_accuracy: chosen.test_accuracy,
            error_rate: chosen.error_rate,
            sparsity_area: chosen.sparsity_area,
            sparsity_area_raw: chosen.sparsity_area_raw,
            learn_seconds: mean(&learn),
            val_seconds: mean(&val),
        });
    }

    let header = "kind,mode,atoms,lambda,reg,val_accuracy,test_accuracy,error_rate,\
                  sparsity_area,sparsity_area_raw,learn_seconds,val_seconds";
    let mut doc = CsvDoc::new(header);
    doc.config("command", "exp-digits");
    doc.config("mode", &args.mode);
    doc.config("synthetic", args.synthetic);
    if let Some(p) = &args.input {
        doc.config("input", p.display());
    }
    doc.config("split", format!("{},{},{}", counts.0, counts.1, counts.2));
    doc.config("side", side);
    doc.config(
        "atoms",
        atoms_list
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    doc.config(
        "lambda_grid",
        args.lambda_grid.as_deref().unwrap_or(default_grid),
    );
    doc.config("svm_epochs", args.svm_epochs);
    doc.config("svm_regs", "1e-4,1e-3,1e-2");
    doc.config("seed", args.seed);
    doc.config("timings", args.timings);
    args.fit.describe(&mut doc);
    for row in &grid {
        doc.row(&[
            "grid".into(),
            args.mode.clone(),
            row.atoms.to_string(),
            f(row.lambda),
            f(row.reg),
            f(row.val_accuracy),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    for row in &selected {
        doc.row(&[
            "selected".into(),
            args.mode.clone(),
            row.atoms.to_string(),
            f(row.lambda),
            f(row.reg),
            f(row.val_accuracy),
            f(row.test_accuracy),
            f(row.error_rate),
            f(row.sparsity_area),
            f(row.sparsity_area_raw),
            secs(row.learn_seconds, args.timings),
            secs(row.val_seconds, args.timings),
        ]);
    }
    doc.write(&args.out)?;
    Ok(DigitsResult { grid, selected })
}
