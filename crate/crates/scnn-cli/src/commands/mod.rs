//! Subcommand implementations. Each command is a plain function over its
//! clap argument struct so the experiment runners are callable from tests.

pub mod codes;
pub mod exp_digits;
pub mod exp_missing;
pub mod exp_noise;
pub mod exp_pca;
pub mod gen;
pub mod train;

use clap::Args;
use scnn_core::model::{Hyperparams, RateOpts, ThresholdMode};

/// Training-loop knobs shared by every command that fits models.
#[derive(Args, Debug, Clone)]
pub struct FitOpts {
    /// Outer iteration cap
    #[arg(long, default_value_t = 50)]
    pub tmax: usize,

    /// Code-update inner iteration cap
    #[arg(long, default_value_t = 1000)]
    pub inner_u_max: usize,

    /// Dictionary-update inner iteration cap
    #[arg(long, default_value_t = 500)]
    pub inner_d_max: usize,

    /// Projection-update inner iteration cap
    #[arg(long, default_value_t = 500)]
    pub inner_c_max: usize,

    /// Outer stop tolerance (relative feed-forward error change)
    #[arg(long, default_value_t = 1e-4)]
    pub rtol: f64,

    /// Inner stop tolerance (relative phase-objective change)
    #[arg(long, default_value_t = 1e-6)]
    pub inner_rtol: f64,

    /// Shrink codes by the literal lambda instead of eta_u*(2*lambda/m)
    #[arg(long)]
    pub literal_threshold: bool,

    /// Frobenius norm in the code learning-rate denominator
    #[arg(long)]
    pub eta_u_frobenius: bool,

    /// Squared-Frobenius Gram norms in the dictionary learning rates
    #[arg(long)]
    pub verbatim_rates: bool,
}

impl Default for FitOpts {
    fn default() -> Self {
        FitOpts {
            tmax: 50,
            inner_u_max: 1000,
            inner_d_max: 500,
            inner_c_max: 500,
            rtol: 1e-4,
            inner_rtol: 1e-6,
            literal_threshold: false,
            eta_u_frobenius: false,
            verbatim_rates: false,
        }
    }
}

impl FitOpts {
    pub fn hyperparams(&self, lambda: f64, atoms: usize, seed: u64) -> Hyperparams {
        let mut hp = Hyperparams::new(lambda, atoms, seed);
        hp.t_max = self.tmax;
        hp.inner_u_max = self.inner_u_max;
        hp.inner_d_max = self.inner_d_max;
        hp.inner_c_max = self.inner_c_max;
        hp.rtol = self.rtol;
        hp.inner_rtol = self.inner_rtol;
        hp.threshold_mode = if self.literal_threshold {
            ThresholdMode::LiteralLambda
        } else {
            ThresholdMode::Consistent
        };
        hp.rate_opts = RateOpts {
            eta_u_frobenius: self.eta_u_frobenius,
            verbatim_gram_rates: self.verbatim_rates,
        };
        hp
    }

    /// Echoes the resolved knobs into a CSV config block.
    pub fn describe(&self, doc: &mut crate::csvout::CsvDoc) {
        doc.config("tmax", self.tmax);
        doc.config("inner_u_max", self.inner_u_max);
        doc.config("inner_d_max", self.inner_d_max);
        doc.config("inner_c_max", self.inner_c_max);
        doc.config("rtol", self.rtol);
        doc.config("inner_rtol", self.inner_rtol);
        doc.config("literal_threshold", self.literal_threshold);
        doc.config("eta_u_frobenius", self.eta_u_frobenius);
        doc.config("verbatim_rates", self.verbatim_rates);
    }
}

/// Sample standard deviation (n−1 denominator), 0 for a single value.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
