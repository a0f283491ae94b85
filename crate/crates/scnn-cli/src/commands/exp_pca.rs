//! `scnn exp-pca`: reconstruction-error comparison of PCA against the
//! network trained with zero sparsity weight, repeated over seeds, at a
//! grid of component counts.

use std::path::PathBuf;

use clap::Args;
use scnn_core::baselines::{pca_fit, pca_reconstruct};
use scnn_core::data::{center_rows, load_matrix};
use scnn_core::metrics::rms_error;
use scnn_core::model::{decode, encode, fit};
use scnn_core::{Matrix, Result};

use crate::commands::gen::{gen_patch_matrix, GenPatchesArgs};
use crate::commands::{mean, sample_std, FitOpts};
use crate::csvout::{f, CsvDoc};
use crate::grid::{parse_usize_list, run_tasks};

#[derive(Args, Debug, Clone)]
pub struct PcaExpArgs {
    /// Pre-extracted patches (binary matrix file); generated synthetically
    /// when absent
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Synthetic source images when no --input is given
    #[arg(long, default_value_t = 20)]
    pub synthetic_images: usize,

    #[arg(long, default_value_t = 128)]
    pub image_size: usize,

    /// Number of patches
    #[arg(long, default_value_t = 2000)]
    pub patches: usize,

    /// Patch side
    #[arg(long, default_value_t = 8)]
    pub side: usize,

    /// Component / atom counts to sweep
    #[arg(long, default_value = "10,30,50")]
    pub components: String,

    /// Independent training repeats per component count
    #[arg(long, default_value_t = 20)]
    pub repeats: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub out: PathBuf,

    /// Worker threads (0 = default)
    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    #[command(flatten)]
    pub fit: FitOpts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaRow {
    pub k: usize,
    pub method: &'static str,
    pub rms_mean: f64,
    pub rms_std: f64,
}

fn load_or_generate_patches(args: &PcaExpArgs) -> Result<Matrix> {
    let raw = match &args.input {
        Some(path) => load_matrix(path)?,
        None => gen_patch_matrix(&GenPatchesArgs {
            images: Vec::new(),
            synthetic_images: args.synthetic_images,
            image_size: args.image_size,
            count: args.patches,
            side: args.side,
            seed: args.seed,
            center: false,
            out: PathBuf::new(),
        })?,
    };
    Ok(center_rows(&raw))
}

pub fn cmd_exp_pca(args: &PcaExpArgs) -> Result<Vec<PcaRow>> {
    let x = load_or_generate_patches(args)?;
    let components = parse_usize_list(&args.components)?;
    if args.repeats == 0 {
        return Err(scnn_core::ScnnError::InvalidParam(
            "repeats must be >= 1".into(),
        ));
    }

    // one task per (component count, repeat)
    let tasks: Vec<(usize, usize)> = components
        .iter()
        .flat_map(|&k| (0..args.repeats).map(move |rep| (k, rep)))
        .collect();
    let scnn_rms: Vec<f64> = run_tasks(args.threads, &tasks, |idx, &(k, _rep)| -> Result<f64> {
        let hp = args.fit.hyperparams(0.0, k, args.seed ^ idx as u64);
        let (model, _) = fit(&x, &hp)?;
        let rec = decode(&model, &encode(&model, &x, false)?)?;
        rms_error(&x, &rec)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (ki, &k) in components.iter().enumerate() {
        let pca = pca_fit(&x, k)?;
        let pca_rms = rms_error(&x, &pca_reconstruct(&pca, &x)?)?;
        rows.push(PcaRow {
            k,
            method: "pca",
            rms_mean: pca_rms,
            rms_std: 0.0,
        });
        let values = &scnn_rms[ki * args.repeats..(ki + 1) * args.repeats];
        rows.push(PcaRow {
            k,
            method: "scnn",
            rms_mean: mean(values),
            rms_std: sample_std(values),
        });
    }

    let mut doc = CsvDoc::new("k,method,rms_mean,rms_std");
    doc.config("command", "exp-pca");
    match &args.input {
        Some(p) => doc.config("input", p.display()),
        None => {
            doc.config("synthetic_images", args.synthetic_images);
            doc.config("image_size", args.image_size);
        }
    }
    doc.config("patches", args.patches);
    doc.config("side", args.side);
    doc.config("components", &args.components);
    doc.config("repeats", args.repeats);
    doc.config("seed", args.seed);
    args.fit.describe(&mut doc);
    for row in &rows {
        doc.row(&[
            row.k.to_string(),
            row.method.to_string(),
            f(row.rms_mean),
            f(row.rms_std),
        ]);
    }
    doc.write(&args.out)?;
    Ok(rows)
}
