//! Synthetic MAR/MCAR scenario generators with known ground truth.
//!
//! The two-cluster generator realizes the classic failure case for
//! cluster-assumption methods: the feature marginal concentrates as two
//! clusters, both containing both classes, but labels are only observed in
//! one cluster. The conditional label rule is one fixed deterministic
//! function of the class-axis coordinate for labeled and unlabeled points
//! alike, so the scenario is missing-at-random by construction and labels
//! can be re-derived from coordinates.
//!
//! The label rule dithers the two-sided class posterior with a hash-derived
//! uniform: statistically the pair (x, y) is distributed exactly as if x had
//! been drawn from the class component at +-`CLASS_MARGIN` and y were that
//! component's side, which gives the closed-form oracle error
//! Phi(-CLASS_MARGIN / noise_scale) for the sign classifier.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::math::{derive_seed, unit_f64};
use crate::ssl::{LabeledSet, UnlabeledSet};
use crate::{FeatureMatrix, Label, Result};

/// Offset of the two class components along the class boundary axis.
pub const CLASS_MARGIN: f64 = 1.0;

const LABEL_SALT: u64 = 0x7fb5_d329_728e_a185;

/// Geometry of the two-cluster MAR scenario (2-d feature space).
#[derive(Debug, Clone, Copy)]
pub struct TwoClusterConfig {
    pub n_labeled: usize,
    pub n_unlabeled: usize,
    /// Distance between the cluster centers along the cluster axis.
    pub cluster_separation: f64,
    /// Axis (0 or 1) that separates the classes; the other axis separates
    /// the clusters.
    pub class_boundary_axis: usize,
    /// Standard deviation of the Gaussian noise on both axes.
    pub noise_scale: f64,
    pub seed: u64,
}

/// Output of [`gen_two_cluster_mar`].
#[derive(Debug, Clone)]
pub struct TwoClusterScenario {
    /// Labeled samples, all from the labeled cluster, exactly class-balanced
    /// when `n_labeled` is even.
    pub labeled: LabeledSet,
    /// Unlabeled samples from both clusters.
    pub unlabeled: UnlabeledSet,
    /// True labels of the unlabeled samples.
    pub unlabeled_truth: Vec<Label>,
    /// Whether each unlabeled sample came from the unlabeled-only cluster.
    pub unlabeled_from_far_cluster: Vec<bool>,
}

impl TwoClusterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_labeled == 0 || self.n_unlabeled == 0 {
            return Err(Error::invalid("sample counts must be at least 1"));
        }
        if self.class_boundary_axis > 1 {
            return Err(Error::invalid("class_boundary_axis must be 0 or 1"));
        }
        if !(self.noise_scale.is_finite() && self.noise_scale > 0.0) {
            return Err(Error::invalid("noise_scale must be positive"));
        }
        if !(self.cluster_separation.is_finite() && self.cluster_separation >= 0.0) {
            return Err(Error::invalid("cluster_separation must be non-negative"));
        }
        Ok(())
    }

    /// True conditional probability of class 1 given the feature vector.
    pub fn class_one_probability(&self, x: &[f64]) -> f64 {
        let t = x[self.class_boundary_axis];
        let s2 = self.noise_scale * self.noise_scale;
        1.0 / (1.0 + (-2.0 * CLASS_MARGIN * t / s2).exp())
    }

    /// The deterministic label rule: the class posterior dithered by a
    /// uniform hashed from the class-axis coordinate and the dataset seed.
    pub fn true_label(&self, x: &[f64]) -> Label {
        let t = x[self.class_boundary_axis];
        let u = unit_f64(derive_seed(self.seed ^ LABEL_SALT, t.to_bits()));
        Label::from(u < self.class_one_probability(x))
    }

    /// The optimal decision given the true posterior: class 1 on the
    /// positive side of the boundary axis.
    pub fn bayes_label(&self, x: &[f64]) -> Label {
        Label::from(x[self.class_boundary_axis] > 0.0)
    }

    /// Conditional error of the optimal decision, min(p, 1 - p).
    pub fn bayes_error(&self, x: &[f64]) -> f64 {
        let p = self.class_one_probability(x);
        p.min(1.0 - p)
    }
}

/// Generates the two-cluster MAR scenario.
///
/// Labeled points are drawn from the labeled cluster with class quotas
/// alternating 0, 1, 0, 1, ... (rejection on the label rule), so even counts
/// are exactly balanced; conditioning on the label leaves the label rule
/// untouched. Unlabeled points pick a cluster by fair coin. Everything is
/// deterministic given the seed.
pub fn gen_two_cluster_mar(cfg: &TwoClusterConfig) -> Result<TwoClusterScenario> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut labeled_features = DMatrix::zeros(cfg.n_labeled, 2);
    let mut labeled_labels = Vec::with_capacity(cfg.n_labeled);
    for i in 0..cfg.n_labeled {
        let want = (i % 2) as Label;
        let x = draw_with_label(cfg, &mut rng, false, want)?;
        labeled_features[(i, 0)] = x[0];
        labeled_features[(i, 1)] = x[1];
        labeled_labels.push(want);
    }
    let labeled = LabeledSet::with_label_set(labeled_features, labeled_labels, vec![0, 1])?;

    let mut unlabeled_features = DMatrix::zeros(cfg.n_unlabeled, 2);
    let mut truth = Vec::with_capacity(cfg.n_unlabeled);
    let mut far = Vec::with_capacity(cfg.n_unlabeled);
    for i in 0..cfg.n_unlabeled {
        let from_far = rng.random::<bool>();
        let x = draw_point(cfg, &mut rng, from_far);
        unlabeled_features[(i, 0)] = x[0];
        unlabeled_features[(i, 1)] = x[1];
        truth.push(cfg.true_label(&x));
        far.push(from_far);
    }
    Ok(TwoClusterScenario {
        labeled,
        unlabeled: UnlabeledSet::new(unlabeled_features)?,
        unlabeled_truth: truth,
        unlabeled_from_far_cluster: far,
    })
}

fn draw_point(cfg: &TwoClusterConfig, rng: &mut ChaCha8Rng, far_cluster: bool) -> [f64; 2] {
    let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let z0: f64 = rng.sample(StandardNormal);
    let z1: f64 = rng.sample(StandardNormal);
    let class_coord = side * CLASS_MARGIN + cfg.noise_scale * z0;
    let cluster_center = if far_cluster { cfg.cluster_separation } else { 0.0 };
    let cluster_coord = cluster_center + cfg.noise_scale * z1;
    let mut x = [0.0; 2];
    x[cfg.class_boundary_axis] = class_coord;
    x[1 - cfg.class_boundary_axis] = cluster_coord;
    x
}

fn draw_with_label(
    cfg: &TwoClusterConfig,
    rng: &mut ChaCha8Rng,
    far_cluster: bool,
    want: Label,
) -> Result<[f64; 2]> {
    for _ in 0..100_000 {
        let x = draw_point(cfg, rng, far_cluster);
        if cfg.true_label(&x) == want {
            return Ok(x);
        }
    }
    Err(Error::invalid(
        "rejection sampling failed to hit the requested class",
    ))
}

/// Class-holdout MAR split of a fully labeled dataset.
#[derive(Debug, Clone)]
pub struct MarSplitConfig {
    /// Labels whose feature regions should be rarely labeled.
    pub rare_labels: Vec<Label>,
    /// Number of points to place in the labeled set.
    pub n_labeled_total: usize,
    /// Sampling weight of rare-label points relative to the rest, in [0, 1).
    pub rare_label_fraction: f64,
    pub seed: u64,
}

/// Output of [`mar_split_by_class`]; indices refer to the source dataset.
#[derive(Debug, Clone)]
pub struct MarSplit {
    pub labeled: LabeledSet,
    pub unlabeled: UnlabeledSet,
    /// True labels of the unlabeled rows.
    pub unlabeled_truth: Vec<Label>,
    pub labeled_indices: Vec<usize>,
    pub unlabeled_indices: Vec<usize>,
}

/// Draws `n_labeled_total` labeled points with rare labels down-weighted to
/// `rare_label_fraction` of their natural sampling weight; every remaining
/// point becomes unlabeled. Weighted sampling without replacement via
/// exponential keys, deterministic given the seed.
pub fn mar_split_by_class(
    features: &FeatureMatrix,
    labels: &[Label],
    cfg: &MarSplitConfig,
) -> Result<MarSplit> {
    let n = features.nrows();
    if labels.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: labels.len(),
        });
    }
    if cfg.n_labeled_total == 0 {
        return Err(Error::invalid("n_labeled_total must be at least 1"));
    }
    if !(0.0..1.0).contains(&cfg.rare_label_fraction) {
        return Err(Error::invalid("rare_label_fraction must lie in [0, 1)"));
    }
    if cfg.n_labeled_total >= n {
        return Err(Error::InsufficientData {
            requested: cfg.n_labeled_total,
            available: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut eligible = 0usize;
    for (i, &label) in labels.iter().enumerate() {
        let w = if cfg.rare_labels.contains(&label) {
            cfg.rare_label_fraction
        } else {
            1.0
        };
        let u = 1.0 - rng.random::<f64>(); // (0, 1]
        let key = if w > 0.0 { -u.ln() / w } else { f64::INFINITY };
        if key.is_finite() {
            eligible += 1;
        }
        keyed.push((key, i));
    }
    if eligible < cfg.n_labeled_total {
        return Err(Error::InsufficientData {
            requested: cfg.n_labeled_total,
            available: eligible,
        });
    }
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut labeled_indices: Vec<usize> =
        keyed[..cfg.n_labeled_total].iter().map(|&(_, i)| i).collect();
    labeled_indices.sort_unstable();
    let mut picked = vec![false; n];
    for &i in &labeled_indices {
        picked[i] = true;
    }
    let unlabeled_indices: Vec<usize> = (0..n).filter(|&i| !picked[i]).collect();

    let d = features.ncols();
    let mut lab_rows = DMatrix::zeros(labeled_indices.len(), d);
    let mut lab_labels = Vec::with_capacity(labeled_indices.len());
    for (r, &i) in labeled_indices.iter().enumerate() {
        lab_rows.set_row(r, &features.row(i));
        lab_labels.push(labels[i]);
    }
    let mut label_set: Vec<Label> = labels.to_vec();
    label_set.sort_unstable();
    label_set.dedup();
    let labeled = LabeledSet::with_label_set(lab_rows, lab_labels, label_set)?;

    let mut unl_rows = DMatrix::zeros(unlabeled_indices.len(), d);
    let mut truth = Vec::with_capacity(unlabeled_indices.len());
    for (r, &i) in unlabeled_indices.iter().enumerate() {
        unl_rows.set_row(r, &features.row(i));
        truth.push(labels[i]);
    }
    Ok(MarSplit {
        labeled,
        unlabeled: UnlabeledSet::new(unl_rows)?,
        unlabeled_truth: truth,
        labeled_indices,
        unlabeled_indices,
    })
}
