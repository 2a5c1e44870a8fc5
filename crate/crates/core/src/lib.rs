//! Reliable semi-supervised classification when labels are missing at random (MAR).
//!
//! The pipeline fits generative density models to labeled and unlabeled
//! features, partitions the feature space by a log-likelihood-ratio test into
//! a label-informative region and its complement, pseudo-labels only the
//! informative unlabeled points by sampling from the labeled-data posterior,
//! and combines the refitted models into a marginal classifier whose error
//! probability stays honest in feature regions that were never labeled.
//!
//! Modules:
//! - [`density`]: Gaussian mixture densities fitted by variational Bayes.
//! - [`dimred`]: PCA feature reduction.
//! - [`partition`]: the label-informative region test.
//! - [`ssl`]: the semi-supervised pipeline, final classifier and baselines.
//! - [`eval`]: reliability diagrams and calibration error.
//! - [`datagen`]: synthetic MAR/MCAR scenario generators with known truth.
//! - [`dataset`]: CSV formats shared by the library and the CLI.

pub mod datagen;
pub mod dataset;
pub mod density;
pub mod dimred;
pub mod error;
pub mod eval;
pub(crate) mod math;
pub mod partition;
pub mod ssl;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// N x d matrix of feature vectors; one row per sample.
pub type FeatureMatrix = nalgebra::DMatrix<f64>;

/// Class label identifier.
pub type Label = u32;
