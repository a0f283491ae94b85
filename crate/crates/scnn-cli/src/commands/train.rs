//! `scnn train`: fit a model on a matrix file, write the model and a
//! per-outer-step energy report.

use std::path::PathBuf;

use clap::Args;
use scnn_core::data::{load_matrix, save_model};
use scnn_core::model::{fit, StopReason, TrainReport};
use scnn_core::Result;

use crate::commands::FitOpts;
use crate::csvout::{f, CsvDoc};

#[derive(Args, Debug, Clone)]
pub struct TrainArgs {
    /// Input signals, binary matrix file (one signal per row)
    #[arg(long)]
    pub input: PathBuf,

    /// Number of atoms (hidden nodes)
    #[arg(long)]
    pub atoms: usize,

    /// Sparsity weight
    #[arg(long)]
    pub lambda: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output model file
    #[arg(long)]
    pub out: PathBuf,

    /// Optional per-step energy CSV
    #[arg(long)]
    pub report: Option<PathBuf>,

    #[command(flatten)]
    pub fit: FitOpts,
}

pub fn cmd_train(args: &TrainArgs) -> Result<TrainReport> {
    let x = load_matrix(&args.input)?;
    let hp = args.fit.hyperparams(args.lambda, args.atoms, args.seed);
    let (model, report) = fit(&x, &hp)?;
    save_model(&args.out, &model)?;
    if let Some(report_path) = &args.report {
        let mut doc = CsvDoc::new("step,e1,e2,total,feedforward_error");
        doc.config("command", "train");
        doc.config("input", args.input.display());
        doc.config("atoms", args.atoms);
        doc.config("lambda", args.lambda);
        doc.config("seed", args.seed);
        args.fit.describe(&mut doc);
        doc.config(
            "stopped_by",
            match report.stopped_by {
                StopReason::Tolerance => "tolerance",
                StopReason::MaxIterations => "max_iterations",
            },
        );
        for rec in &report.step_records {
            doc.row(&[
                rec.step.to_string(),
                f(rec.e1),
                f(rec.e2),
                f(rec.total),
                f(rec.feedforward),
            ]);
        }
        doc.write(report_path)?;
    }
    eprintln!(
        "trained {} atoms in {} outer steps, final feed-forward error {:.6}",
        args.atoms, report.outer_steps_run, report.final_energy
    );
    Ok(report)
}
