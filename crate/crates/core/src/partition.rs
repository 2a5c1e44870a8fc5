//! Partition of the feature space into the label-informative region and its
//! complement.
//!
//! A point is label-informative when some class density fitted on labeled
//! data exceeds the unlabeled-data density by more than a threshold `kappa`
//! on the log scale. Raising `kappa` shrinks the region; membership at the
//! boundary is excluded (strict inequality), so ambiguous points are treated
//! as non-informative.

use crate::density::GmmDensity;
use crate::error::Error;
use crate::math::argmax;
use crate::{Label, Result};

/// The fitted ingredients of the region test: one density per class learned
/// from labeled data, the class prior, and the unlabeled-data density.
#[derive(Debug, Clone)]
pub struct RegionTest {
    labels: Vec<Label>,
    class_densities: Vec<GmmDensity>,
    class_prior: Vec<f64>,
    unlabeled_density: GmmDensity,
    kappa: f64,
}

impl RegionTest {
    /// `labels` must be strictly increasing; densities and prior entries are
    /// parallel to it and must share one dimension with `unlabeled_density`.
    pub fn new(
        labels: Vec<Label>,
        class_densities: Vec<GmmDensity>,
        class_prior: Vec<f64>,
        unlabeled_density: GmmDensity,
        kappa: f64,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("label set must be nonempty"));
        }
        if !labels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("labels must be strictly increasing"));
        }
        if class_densities.len() != labels.len() || class_prior.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: class_densities.len().min(class_prior.len()),
            });
        }
        let dim = unlabeled_density.dim();
        for g in &class_densities {
            if g.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: g.dim(),
                });
            }
        }
        let sum: f64 = class_prior.iter().sum();
        if class_prior.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("class prior must be a probability vector"));
        }
        if kappa.is_nan() {
            return Err(Error::invalid("kappa must not be NaN"));
        }
        Ok(RegionTest {
            labels,
            class_densities,
            class_prior,
            unlabeled_density,
            kappa,
        })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn class_densities(&self) -> &[GmmDensity] {
        &self.class_densities
    }

    pub fn class_prior(&self) -> &[f64] {
        &self.class_prior
    }

    pub fn unlabeled_density(&self) -> &GmmDensity {
        &self.unlabeled_density
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.unlabeled_density.dim()
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    /// Per-class log-likelihood ratios ln q(x|y, labeled) - ln q(x| unlabeled).
    pub fn class_log_ratios(&self, x: &[f64]) -> Result<Vec<f64>> {
        let lq0 = self.unlabeled_density.log_density(x)?;
        self.class_densities
            .iter()
            .map(|g| Ok(g.log_density(x)? - lq0))
            .collect()
    }

    /// Maximum log-likelihood ratio over classes and the maximizing label;
    /// ties resolve to the smallest label.
    pub fn log_likelihood_ratio(&self, x: &[f64]) -> Result<(f64, Label)> {
        let ratios = self.class_log_ratios(x)?;
        let idx = argmax(&ratios);
        Ok((ratios[idx], self.labels[idx]))
    }

    /// True iff the maximum ratio strictly exceeds `kappa`.
    pub fn in_region(&self, x: &[f64]) -> Result<bool> {
        let (ratio, _) = self.log_likelihood_ratio(x)?;
        Ok(ratio > self.kappa)
    }
}
