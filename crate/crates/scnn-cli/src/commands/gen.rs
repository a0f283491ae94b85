//! `scnn gen-patches` and `scnn gen-digits`: produce patch matrix files
//! from PGM images or synthetic image fields, and synthetic digit IDX
//! fixtures.

use std::path::PathBuf;

use clap::Args;
use scnn_core::data::{
    center_rows, extract_patches, gen_digit_dataset, gen_images, load_pgm, merge_patch_sets,
    save_idx_images, save_idx_labels, save_matrix, PatchSet,
};
use scnn_core::{Matrix, Result, ScnnError, SeededRng};

#[derive(Args, Debug, Clone)]
pub struct GenPatchesArgs {
    /// PGM files or directories to scan for *.pgm (sorted by path)
    #[arg(long, num_args = 1.., conflicts_with = "synthetic_images")]
    pub images: Vec<PathBuf>,

    /// Generate this many synthetic image fields instead of reading PGMs
    #[arg(long, default_value_t = 0)]
    pub synthetic_images: usize,

    /// Side of the synthetic images
    #[arg(long, default_value_t = 128)]
    pub image_size: usize,

    /// Total number of patches
    #[arg(long, default_value_t = 2000)]
    pub count: usize,

    /// Patch side in pixels
    #[arg(long, default_value_t = 8)]
    pub side: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Center every patch to zero mean
    #[arg(long)]
    pub center: bool,

    /// Output binary matrix file
    #[arg(long)]
    pub out: PathBuf,
}

fn collect_pgm_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for input in inputs {
        if input.is_dir() {
            for entry in std::fs::read_dir(input)? {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "pgm") {
                    paths.push(path);
                }
            }
        } else {
            paths.push(input.clone());
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(ScnnError::EmptyInput("no PGM images found".into()));
    }
    Ok(paths)
}

/// Builds the patch matrix from the configured source.
pub fn gen_patch_matrix(args: &GenPatchesArgs) -> Result<Matrix> {
    let mut rng = SeededRng::new(args.seed);
    let images: Vec<Matrix> = if args.synthetic_images > 0 {
        gen_images(args.synthetic_images, args.image_size, &mut rng)
    } else {
        let paths = collect_pgm_paths(&args.images)?;
        paths.iter().map(load_pgm).collect::<Result<_>>()?
    };
    if args.count == 0 {
        return Err(ScnnError::InvalidParam("patch count must be > 0".into()));
    }
    let per_image = args.count / images.len();
    let extra = args.count % images.len();
    let mut sets: Vec<PatchSet> = Vec::new();
    for (i, image) in images.iter().enumerate() {
        let count = per_image + usize::from(i < extra);
        if count == 0 {
            continue;
        }
        sets.push(extract_patches(image, args.side, count, &mut rng)?);
    }
    let merged = merge_patch_sets(&sets)?;
    let x = if args.center {
        center_rows(&merged.x)
    } else {
        merged.x
    };
    Ok(x)
}

pub fn cmd_gen_patches(args: &GenPatchesArgs) -> Result<()> {
    if args.synthetic_images == 0 && args.images.is_empty() {
        return Err(ScnnError::InvalidParam(
            "pass --images or --synthetic-images".into(),
        ));
    }
    let x = gen_patch_matrix(args)?;
    save_matrix(&args.out, &x)?;
    eprintln!("wrote {} patches of side {}", x.rows(), args.side);
    Ok(())
}

#[derive(Args, Debug, Clone)]
pub struct GenDigitsArgs {
    /// Number of digits (classes interleave 0..9)
    #[arg(long, default_value_t = 1500)]
    pub count: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output IDX image file
    #[arg(long)]
    pub out_images: PathBuf,

    /// Output IDX label file
    #[arg(long)]
    pub out_labels: PathBuf,
}

pub fn cmd_gen_digits(args: &GenDigitsArgs) -> Result<()> {
    let mut rng = SeededRng::new(args.seed);
    let ds = gen_digit_dataset(args.count, &mut rng);
    save_idx_images(&args.out_images, &ds.x, 28, 28)?;
    save_idx_labels(&args.out_labels, &ds.labels)?;
    eprintln!("wrote {} synthetic digits", args.count);
    Ok(())
}
