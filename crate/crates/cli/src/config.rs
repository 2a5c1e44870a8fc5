//! Run configuration: a JSON file with per-flag overrides.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use marssl_core::density::VbConfig;
use marssl_core::Label;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Which fit to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Selective label-sampling with the region test.
    Mar,
    /// Self-training that pseudo-labels every unlabeled point.
    Mcar,
    /// Labeled data only.
    Supervised,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mar => "mar",
            Method::Mcar => "mcar",
            Method::Supervised => "supervised",
        }
    }
}

/// All command parameters; each command reads the fields it needs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub method: Option<Method>,
    pub kappa: Option<f64>,
    pub pca_dim: Option<usize>,
    pub bins: Option<usize>,
    pub labeled: Option<PathBuf>,
    pub unlabeled: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub vb: Option<VbSettings>,
    pub synth: Option<SynthSpec>,
}

/// Optional overrides of the variational-fit defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VbSettings {
    pub max_components: Option<usize>,
    pub dirichlet_concentration: Option<f64>,
    pub prior_mean_scale: Option<f64>,
    pub wishart_dof_offset: Option<f64>,
    pub max_iters: Option<usize>,
    pub elbo_tol: Option<f64>,
    pub reg_floor: Option<f64>,
}

impl VbSettings {
    pub fn to_config(&self, seed: u64) -> VbConfig {
        let d = VbConfig::default();
        VbConfig {
            max_components: self.max_components.unwrap_or(d.max_components),
            dirichlet_concentration: self
                .dirichlet_concentration
                .unwrap_or(d.dirichlet_concentration),
            prior_mean_scale: self.prior_mean_scale.unwrap_or(d.prior_mean_scale),
            wishart_dof_offset: self.wishart_dof_offset.unwrap_or(d.wishart_dof_offset),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            elbo_tol: self.elbo_tol.unwrap_or(d.elbo_tol),
            reg_floor: self.reg_floor.unwrap_or(d.reg_floor),
            seed,
        }
    }
}

/// Synthetic dataset description for the `synth` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case", deny_unknown_fields)]
pub enum SynthSpec {
    /// The two-cluster MAR scenario; optionally also emits an i.i.d. test
    /// split with ground truth.
    TwoCluster {
        n_labeled: usize,
        n_unlabeled: usize,
        #[serde(default)]
        n_test: Option<usize>,
        cluster_separation: f64,
        class_boundary_axis: usize,
        noise_scale: f64,
    },
    /// Class-holdout MAR split of an existing fully labeled dataset.
    MarSplit {
        source: PathBuf,
        n_labeled_total: usize,
        rare_labels: Vec<Label>,
        rare_label_fraction: f64,
    },
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    /// Seed resolution: flag beats MARSSL_SEED beats config file beats 0.
    pub fn resolve_seed(&self, flag: Option<u64>) -> Result<u64, CliError> {
        if let Some(s) = flag {
            return Ok(s);
        }
        if let Ok(raw) = std::env::var("MARSSL_SEED") {
            return raw
                .parse()
                .map_err(|_| CliError::input(format!("MARSSL_SEED is not a u64: {raw:?}")));
        }
        Ok(self.seed.unwrap_or(0))
    }

    pub fn require(&self, field: Option<&PathBuf>, name: &str) -> Result<PathBuf, CliError> {
        field
            .cloned()
            .ok_or_else(|| CliError::input(format!("missing required setting {name:?}")))
    }
}
