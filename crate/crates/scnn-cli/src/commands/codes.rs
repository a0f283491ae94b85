//! `scnn encode` and `scnn reconstruct`: apply a trained model to a matrix
//! file, writing codes or reconstructions as CSV rows or a binary matrix.

use std::path::PathBuf;

use clap::Args;
use scnn_core::data::{load_matrix, load_model, save_matrix};
use scnn_core::model::{decode, encode};
use scnn_core::{Matrix, Result};

use crate::csvout::f;

#[derive(Args, Debug, Clone)]
pub struct CodesArgs {
    /// Trained model file
    #[arg(long)]
    pub model: PathBuf,

    /// Input signals, binary matrix file
    #[arg(long)]
    pub input: PathBuf,

    /// Output path (CSV rows by default)
    #[arg(long)]
    pub out: PathBuf,

    /// Skip the encode-time soft threshold
    #[arg(long)]
    pub no_threshold: bool,

    /// Write a binary matrix file instead of CSV
    #[arg(long)]
    pub binary: bool,
}

fn write_matrix(args: &CodesArgs, m: &Matrix) -> Result<()> {
    if args.binary {
        save_matrix(&args.out, m)
    } else {
        let mut out = String::new();
        for r in 0..m.rows() {
            let fields: Vec<String> = m.row(r).iter().map(|&v| f(v)).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        std::fs::write(&args.out, out)?;
        Ok(())
    }
}

pub fn cmd_encode(args: &CodesArgs) -> Result<Matrix> {
    let model = load_model(&args.model)?;
    let x = load_matrix(&args.input)?;
    let codes = encode(&model, &x, !args.no_threshold)?;
    write_matrix(args, &codes)?;
    Ok(codes)
}

pub fn cmd_reconstruct(args: &CodesArgs) -> Result<Matrix> {
    let model = load_model(&args.model)?;
    let x = load_matrix(&args.input)?;
    let codes = encode(&model, &x, !args.no_threshold)?;
    let rec = decode(&model, &codes)?;
    write_matrix(args, &rec)?;
    Ok(rec)
}
