use clap::{Parser, Subcommand};

use scnn_cli::commands;

#[derive(Parser)]
#[command(
    name = "scnn",
    version,
    about = "Sparse-coding two-layer linear network: train, encode, and run experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model on a matrix file
    Train(commands::train::TrainArgs),
    /// Encode signals to sparse codes with a trained model
    Encode(commands::codes::CodesArgs),
    /// Encode then decode signals with a trained model
    Reconstruct(commands::codes::CodesArgs),
    /// Build a patch matrix file from PGM images or synthetic fields
    GenPatches(commands::gen::GenPatchesArgs),
    /// Write synthetic digit IDX fixtures
    GenDigits(commands::gen::GenDigitsArgs),
    /// Reconstruction-error comparison against PCA
    ExpPca(commands::exp_pca::PcaExpArgs),
    /// Missing-pixels reconstruction study
    ExpMissing(commands::exp_missing::MissingExpArgs),
    /// Digit classification from sparse codes
    ExpDigits(commands::exp_digits::DigitsExpArgs),
    /// Digit classification under additive Gaussian noise
    ExpNoise(commands::exp_noise::NoiseExpArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(args) => commands::train::cmd_train(args).map(|_| ()),
        Command::Encode(args) => commands::codes::cmd_encode(args).map(|_| ()),
        Command::Reconstruct(args) => commands::codes::cmd_reconstruct(args).map(|_| ()),
        Command::GenPatches(args) => commands::gen::cmd_gen_patches(args),
        Command::GenDigits(args) => commands::gen::cmd_gen_digits(args),
        Command::ExpPca(args) => commands::exp_pca::cmd_exp_pca(args).map(|_| ()),
        Command::ExpMissing(args) => commands::exp_missing::cmd_exp_missing(args).map(|_| ()),
        Command::ExpDigits(args) => commands::exp_digits::cmd_exp_digits(args).map(|_| ()),
        Command::ExpNoise(args) => commands::exp_noise::cmd_exp_noise(args).map(|_| ()),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
