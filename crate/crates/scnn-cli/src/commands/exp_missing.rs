//! `scnn exp-missing`: reconstruct corrupted patches with models trained on
//! clean patches. Per noise level, the sparsity weight is picked on a
//! corrupted validation set by minimum reconstruction error against the
//! clean signals, then scored on a corrupted test set.

use std::path::PathBuf;

use clap::Args;
use scnn_core::baselines::{
    pca_fit, pca_project, pca_reconstruct, sparsenet_fit, sparsenet_infer, SparsenetCaps,
    SparsenetModel,
};
use scnn_core::data::{corrupt_missing, load_matrix};
use scnn_core::metrics::{
    rms_error, sparsity_area, sparsity_area_raw, sparsity_curve, sparsity_value,
};
use scnn_core::model::{decode, encode, fit, ScnnModel};
use scnn_core::{Matrix, Result, ScnnError, SeededRng};

use crate::commands::FitOpts;
use crate::csvout::{f, CsvDoc};
use crate::grid::{parse_f64_list, parse_grid, run_tasks};

#[derive(Args, Debug, Clone)]
pub struct MissingExpArgs {
    /// Clean training patches (binary matrix file)
    #[arg(long)]
    pub input: PathBuf,

    /// Clean validation patches
    #[arg(long)]
    pub val: PathBuf,

    /// Clean test patches
    #[arg(long)]
    pub test: PathBuf,

    /// Atoms for the network and Sparsenet (PCA uses min(atoms, p))
    #[arg(long, default_value_t = 100)]
    pub atoms: usize,

    /// Sparsity-weight grid, lo:hi:n
    #[arg(long, default_value = "0.01:1:40")]
    pub lambda_grid: String,

    /// Sparsenet weight grid, lo:hi:n
    #[arg(long, default_value = "0.01:20:40")]
    pub sparsenet_lambda_grid: String,

    #[arg(long, default_value_t = 0.316)]
    pub sparsenet_sigma: f64,

    #[arg(long, default_value_t = 60)]
    pub sparsenet_outer_max: usize,

    #[arg(long, default_value_t = 80)]
    pub sparsenet_inner_max: usize,

    /// Missing-pixel fractions
    #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5")]
    pub noise_levels: String,

    /// Methods to run (any of scnn, sparsenet, pca)
    #[arg(long, default_value = "scnn,sparsenet,pca")]
    pub methods: String,

    /// Threshold for the sparsity_at_th column
    #[arg(long, default_value_t = 0.1)]
    pub sparsity_threshold: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    #[command(flatten)]
    pub fit: FitOpts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissingRow {
    pub method: String,
    pub noise: f64,
    /// None for PCA, which has no sparsity weight.
    pub best_lambda: Option<f64>,
    pub test_rms: f64,
    pub sparsity_area: f64,
    pub sparsity_area_raw: f64,
    pub sparsity_at_th: f64,
}

fn sparsity_columns(codes: &Matrix, th: f64) -> Result<(f64, f64, f64)> {
    let curve = sparsity_curve(codes, 11);
    Ok((
        sparsity_area(&curve)?,
        sparsity_area_raw(&curve)?,
        sparsity_value(codes, th),
    ))
}

struct CorruptedSplits {
    val: Vec<Matrix>,
    test: Vec<Matrix>,
}

/// Corruption is applied once per noise level with seeds derived from the
/// base seed (val: seed^(1000+i), test: seed^(2000+i)), so every method
/// sees identical corrupted pixels.
fn corrupt_splits(
    val: &Matrix,
    test: &Matrix,
    noise_levels: &[f64],
    seed: u64,
) -> Result<CorruptedSplits> {
    let mut out = CorruptedSplits {
        val: Vec::new(),
        test: Vec::new(),
    };
    for (i, &fraction) in noise_levels.iter().enumerate() {
        let mut rng = SeededRng::new(seed ^ (1000 + i as u64));
        out.val.push(corrupt_missing(val, fraction, &mut rng)?.0);
        let mut rng = SeededRng::new(seed ^ (2000 + i as u64));
        out.test.push(corrupt_missing(test, fraction, &mut rng)?.0);
    }
    Ok(out)
}

pub fn cmd_exp_missing(args: &MissingExpArgs) -> Result<Vec<MissingRow>> {
    let train = load_matrix(&args.input)?;
    let val = load_matrix(&args.val)?;
    let test = load_matrix(&args.test)?;
    let noise_levels = parse_f64_list(&args.noise_levels)?;
    let methods: Vec<String> = args
        .methods
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    for m in &methods {
        if !["scnn", "sparsenet", "pca"].contains(&m.as_str()) {
            return Err(ScnnError::InvalidParam(format!("unknown method '{m}'")));
        }
    }
    let corrupted = corrupt_splits(&val, &test, &noise_levels, args.seed)?;

    let mut rows = Vec::new();
    for method in &methods {
        match method.as_str() {
            "scnn" => rows.extend(run_scnn(
                args,
                &train,
                &val,
                &test,
                &noise_levels,
                &corrupted,
            )?),
            "sparsenet" => rows.extend(run_sparsenet(
                args,
                &train,
                &val,
                &test,
                &noise_levels,
                &corrupted,
            )?),
            "pca" => rows.extend(run_pca(args, &train, &test, &noise_levels, &corrupted)?),
            _ => unreachable!(),
        }
    }

    let mut doc = CsvDoc::new(
        "method,noise,best_lambda,test_rms,sparsity_area,sparsity_area_raw,sparsity_at_th",
    );
    doc.config("command", "exp-missing");
    doc.config("input", args.input.display());
    doc.config("val", args.val.display());
    doc.config("test", args.test.display());
    doc.config("atoms", args.atoms);
    doc.config("lambda_grid", &args.lambda_grid);
    doc.config("sparsenet_lambda_grid", &args.sparsenet_lambda_grid);
    doc.config("sparsenet_sigma", args.sparsenet_sigma);
    doc.config("noise_levels", &args.noise_levels);
    doc.config("methods", &args.methods);
    doc.config("sparsity_threshold", args.sparsity_threshold);
    doc.config("seed", args.seed);
    args.fit.describe(&mut doc);
    for row in &rows {
        doc.row(&[
            row.method.clone(),
            f(row.noise),
            row.best_lambda.map(f).unwrap_or_default(),
            f(row.test_rms),
            f(row.sparsity_area),
            f(row.sparsity_area_raw),
            f(row.sparsity_at_th),
        ]);
    }
    doc.write(&args.out)?;
    Ok(rows)
}

fn run_scnn(
    args: &MissingExpArgs,
    train: &Matrix,
    val: &Matrix,
    test: &Matrix,
    noise_levels: &[f64],
    corrupted: &CorruptedSplits,
) -> Result<Vec<MissingRow>> {
    let lambdas = parse_grid(&args.lambda_grid)?;
    let models: Vec<ScnnModel> = run_tasks(args.threads, &lambdas, |idx, &lambda| {
        let hp = args
            .fit
            .hyperparams(lambda, args.atoms, args.seed ^ idx as u64);
        fit(train, &hp).map(|(model, _)| model)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (ni, &noise) in noise_levels.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (li, model) in models.iter().enumerate() {
            let rec = decode(model, &encode(model, &corrupted.val[ni], false)?)?;
            let rms = rms_error(val, &rec)?;
            if best.map_or(true, |(_, b)| rms < b) {
                best = Some((li, rms));
            }
        }
        let (best_li, _) = best.expect("non-empty lambda grid");
        let model = &models[best_li];
        let codes = encode(model, &corrupted.test[ni], false)?;
        let rec = decode(model, &codes)?;
        let (area, area_raw, at_th) = sparsity_columns(&codes, args.sparsity_threshold)?;
        rows.push(MissingRow {
            method: "scnn".into(),
            noise,
            best_lambda: Some(lambdas[best_li]),
            test_rms: rms_error(test, &rec)?,
            sparsity_area: area,
            sparsity_area_raw: area_raw,
            sparsity_at_th: at_th,
        });
    }
    Ok(rows)
}

fn run_sparsenet(
    args: &MissingExpArgs,
    train: &Matrix,
    val: &Matrix,
    test: &Matrix,
    noise_levels: &[f64],
    corrupted: &CorruptedSplits,
) -> Result<Vec<MissingRow>> {
    let lambdas = parse_grid(&args.sparsenet_lambda_grid)?;
    let caps = SparsenetCaps {
        outer_max: args.sparsenet_outer_max,
        code_max: args.sparsenet_inner_max,
        dict_max: args.sparsenet_inner_max,
        rtol: args.fit.inner_rtol,
        seed: args.seed,
    };
    let models: Vec<SparsenetModel> = run_tasks(args.threads, &lambdas, |idx, &lambda| {
        let caps = SparsenetCaps {
            seed: args.seed ^ idx as u64,
            ..caps
        };
        sparsenet_fit(train, args.atoms, lambda, args.sparsenet_sigma, caps).map(|(m, _)| m)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (ni, &noise) in noise_levels.iter().enumerate() {
        // inference re-runs optimization per input set
        let val_rms: Vec<f64> = run_tasks(args.threads, &models, |_, model| {
            let (codes, _) = sparsenet_infer(model, &corrupted.val[ni], caps)?;
            let rec = codes.mul_nt(model.dict())?;
            rms_error(val, &rec)
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let best_li = val_rms
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite rms"))
            .map(|(i, _)| i)
            .expect("non-empty grid");
        let model = &models[best_li];
        let (codes, _) = sparsenet_infer(model, &corrupted.test[ni], caps)?;
        let rec = codes.mul_nt(model.dict())?;
        let (area, area_raw, at_th) = sparsity_columns(&codes, args.sparsity_threshold)?;
        rows.push(MissingRow {
            method: "sparsenet".into(),
            noise,
            best_lambda: Some(lambdas[best_li]),
            test_rms: rms_error(test, &rec)?,
            sparsity_area: area,
            sparsity_area_raw: area_raw,
            sparsity_at_th: at_th,
        });
    }
    Ok(rows)
}

fn run_pca(
    args: &MissingExpArgs,
    train: &Matrix,
    test: &Matrix,
    noise_levels: &[f64],
    corrupted: &CorruptedSplits,
) -> Result<Vec<MissingRow>> {
    let k = args.atoms.min(train.cols());
    let model = pca_fit(train, k)?;
    let mut rows = Vec::new();
    for (ni, &noise) in noise_levels.iter().enumerate() {
        let rec = pca_reconstruct(&model, &corrupted.test[ni])?;
        let codes = pca_project(&model, &corrupted.test[ni])?;
        let (area, area_raw, at_th) = sparsity_columns(&codes, args.sparsity_threshold)?;
        rows.push(MissingRow {
            method: "pca".into(),
            noise,
            best_lambda: None,
            test_rms: rms_error(test, &rec)?,
            sparsity_area: area,
            sparsity_area_raw: area_raw,
            sparsity_at_th: at_th,
        });
    }
    Ok(rows)
}
