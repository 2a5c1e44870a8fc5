//! marssl: fit, apply and evaluate reliable semi-supervised classifiers on
//! CSV datasets.
//!
//! Exit codes: 0 success, 2 malformed input, 3 fitting failure, 4 shape
//! mismatch between model and data, 5 misaligned prediction/truth files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use marssl::config::{Method, RunConfig};
use marssl::{commands, CliError};

#[derive(Parser)]
#[command(
    name = "marssl",
    version,
    about = "Reliable semi-supervised classification when labels are missing at random"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model from labeled and unlabeled CSV datasets.
    Fit(CommonArgs),
    /// Predict labels and error probabilities for a test CSV.
    Predict(CommonArgs),
    /// Compare predictions against ground truth with reliability diagrams.
    Evaluate(CommonArgs),
    /// Generate synthetic datasets with known ground truth.
    Synth(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (also set by MARSSL_SEED).
    #[arg(long)]
    seed: Option<u64>,
    /// Fit method.
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Region-test threshold.
    #[arg(long)]
    kappa: Option<f64>,
    /// PCA target dimension applied before fitting.
    #[arg(long)]
    pca_dim: Option<usize>,
    /// Number of reliability bins.
    #[arg(long)]
    bins: Option<usize>,
    /// Labeled dataset CSV.
    #[arg(long)]
    labeled: Option<PathBuf>,
    /// Unlabeled dataset CSV.
    #[arg(long)]
    unlabeled: Option<PathBuf>,
    /// Test dataset CSV.
    #[arg(long)]
    test: Option<PathBuf>,
    /// Model JSON path (output of fit, input of predict).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Predictions CSV path (output of predict, input of evaluate).
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Ground-truth CSV path.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Output directory for evaluate and synth.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<(RunConfig, u64), CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let seed = cfg.resolve_seed(self.seed)?;
        cfg.seed = Some(seed);
        if self.method.is_some() {
            cfg.method = self.method;
        }
        if self.kappa.is_some() {
            cfg.kappa = self.kappa;
        }
        if self.pca_dim.is_some() {
            cfg.pca_dim = self.pca_dim;
        }
        if self.bins.is_some() {
            cfg.bins = self.bins;
        }
        let paths = [
            (&self.labeled, &mut cfg.labeled),
            (&self.unlabeled, &mut cfg.unlabeled),
            (&self.test, &mut cfg.test),
            (&self.model, &mut cfg.model),
            (&self.predictions, &mut cfg.predictions),
            (&self.truth, &mut cfg.truth),
            (&self.out_dir, &mut cfg.out_dir),
        ];
        for (flag, slot) in paths {
            if flag.is_some() {
                *slot = flag.clone();
            }
        }
        Ok((cfg, seed))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fit(args) => args.resolve().and_then(|(cfg, s)| commands::cmd_fit(&cfg, s)),
        Command::Predict(args) => args
            .resolve()
            .and_then(|(cfg, s)| commands::cmd_predict(&cfg, s)),
        Command::Evaluate(args) => args
            .resolve()
            .and_then(|(cfg, s)| commands::cmd_evaluate(&cfg, s)),
        Command::Synth(args) => args
            .resolve()
            .and_then(|(cfg, s)| commands::cmd_synth(&cfg, s)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
