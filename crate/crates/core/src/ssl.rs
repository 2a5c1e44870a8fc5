//! Semi-supervised learning pipeline and the final marginal classifier.
//!
//! The proposed fit runs in three stages: initial generative models from the
//! labeled and unlabeled sets, selective label-sampling of the unlabeled
//! points inside the label-informative region, and a constrained refit in
//! which the residual unlabeled density is class-independent with a uniform
//! label prior. Under those constraints the likelihood objective decouples,
//! so the refit is two independent fits: class models on the augmented set
//! D', the residual density on D''.
//!
//! Two baselines share the same model type and predict path:
//! [`fit_mcar_selftrain`] label-samples every unlabeled point (a region test
//! that accepts everything), and [`fit_supervised`] ignores unlabeled data.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::density::{fit_gaussian, fit_vb_gmm, GmmDensity, VbConfig};
use crate::error::Error;
use crate::math::{argmax, derive_seed, logsumexp2, unit_f64};
use crate::partition::RegionTest;
use crate::{FeatureMatrix, Label, Result};

// Seed streams derived from one master seed.
const STREAM_INIT: u64 = 1;
const STREAM_SAMPLE: u64 = 2;
const STREAM_FINAL: u64 = 3;
const STREAM_CLASSES: u64 = 11;
const STREAM_POOL: u64 = 12;

/// Labeled samples plus the declared label set.
#[derive(Debug, Clone)]
pub struct LabeledSet {
    features: FeatureMatrix,
    labels: Vec<Label>,
    label_set: Vec<Label>,
}

impl LabeledSet {
    /// Declares the label set as the sorted distinct observed labels.
    pub fn new(features: FeatureMatrix, labels: Vec<Label>) -> Result<Self> {
        let mut label_set = labels.clone();
        label_set.sort_unstable();
        label_set.dedup();
        Self::with_label_set(features, labels, label_set)
    }

    /// Uses an explicit label set; classes may then be declared without any
    /// observed sample (they fall back to a pooled density when fitting).
    pub fn with_label_set(
        features: FeatureMatrix,
        labels: Vec<Label>,
        mut label_set: Vec<Label>,
    ) -> Result<Self> {
        label_set.sort_unstable();
        label_set.dedup();
        if features.nrows() == 0 {
            return Err(Error::EmptyData {
                min: 1,
                got: 0,
            });
        }
        if features.nrows() != labels.len() {
            return Err(Error::LengthMismatch {
                left: features.nrows(),
                right: labels.len(),
            });
        }
        if label_set.is_empty() {
            return Err(Error::invalid("label set must be nonempty"));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("features must be finite"));
        }
        for &l in &labels {
            if label_set.binary_search(&l).is_err() {
                return Err(Error::UnknownLabel(l));
            }
        }
        Ok(LabeledSet {
            features,
            labels,
            label_set,
        })
    }

    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &FeatureMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label_set(&self) -> &[Label] {
        &self.label_set
    }

    /// Count of samples per label, parallel to `label_set`.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.label_set.len()];
        for &l in &self.labels {
            let idx = self.label_set.binary_search(&l).expect("validated label");
            counts[idx] += 1;
        }
        counts
    }

    /// Rows carrying the given label.
    pub fn class_features(&self, label: Label) -> FeatureMatrix {
        let idx: Vec<usize> = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(i, _)| i)
            .collect();
        let mut out = DMatrix::zeros(idx.len(), self.dim());
        for (r, &i) in idx.iter().enumerate() {
            out.set_row(r, &self.features.row(i));
        }
        out
    }
}

/// Unlabeled samples. May be empty (the supervised degenerate case).
#[derive(Debug, Clone)]
pub struct UnlabeledSet {
    features: FeatureMatrix,
}

impl UnlabeledSet {
    pub fn new(features: FeatureMatrix) -> Result<Self> {
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("features must be finite"));
        }
        Ok(UnlabeledSet { features })
    }

    pub fn empty(dim: usize) -> Self {
        UnlabeledSet {
            features: DMatrix::zeros(0, dim),
        }
    }

    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &FeatureMatrix {
        &self.features
    }
}

/// The fitted semi-supervised model: per-class densities and prior from the
/// augmented labeled set D', the residual unlabeled density from D'', and
/// the mixture weight w = |D'| / (|D'| + |D''|).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MarModelRepr", into = "MarModelRepr")]
pub struct MarModel {
    label_set: Vec<Label>,
    class_densities: Vec<GmmDensity>,
    class_prior: Vec<f64>,
    class_counts: Vec<usize>,
    unlabeled_density: GmmDensity,
    w: f64,
    kappa: f64,
    augmented_count: usize,
    residual_count: usize,
}

/// Classifier output for a single point.
#[derive(Debug, Clone)]
pub struct Prediction {
    /// Predicted label (argmax of the posterior, lowest label on ties).
    pub label: Label,
    /// Posterior over the label set; sums to one.
    pub posterior: Vec<f64>,
    /// Learned error probability, 1 - max posterior.
    pub error_prob: f64,
    /// Whether the point passes the region test of the refitted densities.
    pub in_region: bool,
    /// ln q(x|y) q(y) per label.
    pub log_marginals: Vec<f64>,
}

impl MarModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label_set: Vec<Label>,
        class_densities: Vec<GmmDensity>,
        class_prior: Vec<f64>,
        class_counts: Vec<usize>,
        unlabeled_density: GmmDensity,
        kappa: f64,
        augmented_count: usize,
        residual_count: usize,
    ) -> Result<Self> {
        if label_set.is_empty() || !label_set.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("label set must be nonempty and increasing"));
        }
        let k = label_set.len();
        if class_densities.len() != k || class_prior.len() != k || class_counts.len() != k {
            return Err(Error::LengthMismatch {
                left: k,
                right: class_densities.len(),
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
        if class_prior.iter().any(|&p| !(p > 0.0 && p <= 1.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("class prior must be positive and normalized"));
        }
        if kappa.is_nan() {
            return Err(Error::invalid("kappa must not be NaN"));
        }
        if augmented_count == 0 {
            return Err(Error::invalid("augmented set must be nonempty"));
        }
        let w = augmented_count as f64 / (augmented_count + residual_count) as f64;
        Ok(MarModel {
            label_set,
            class_densities,
            class_prior,
            class_counts,
            unlabeled_density,
            w,
            kappa,
            augmented_count,
            residual_count,
        })
    }

    pub fn label_set(&self) -> &[Label] {
        &self.label_set
    }

    pub fn class_densities(&self) -> &[GmmDensity] {
        &self.class_densities
    }

    pub fn class_prior(&self) -> &[f64] {
        &self.class_prior
    }

    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn unlabeled_density(&self) -> &GmmDensity {
        &self.unlabeled_density
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn augmented_count(&self) -> usize {
        self.augmented_count
    }

    pub fn residual_count(&self) -> usize {
        self.residual_count
    }

    pub fn dim(&self) -> usize {
        self.unlabeled_density.dim()
    }

    /// Marginal label prior q(y) = w q(y|labeled) + (1-w)/|Y|.
    pub fn marginal_label_prior(&self) -> Vec<f64> {
        let k = self.label_set.len() as f64;
        self.class_prior
            .iter()
            .map(|&p| self.w * p + (1.0 - self.w) / k)
            .collect()
    }

    /// Replaces the labeled class prior (mainly for analysis).
    pub fn with_class_prior(mut self, class_prior: Vec<f64>) -> Result<Self> {
        if class_prior.len() != self.label_set.len() {
            return Err(Error::LengthMismatch {
                left: self.label_set.len(),
                right: class_prior.len(),
            });
        }
        let sum: f64 = class_prior.iter().sum();
        if class_prior.iter().any(|&p| !(p > 0.0 && p <= 1.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("class prior must be positive and normalized"));
        }
        self.class_prior = class_prior;
        Ok(self)
    }

    /// Classifies one point.
    ///
    /// All per-class quantities are computed in log space; the two-term
    /// mixture w q(x|y, labeled) + (1-w) q(x| unlabeled) goes through a
    /// two-term log-sum-exp since (1-w) can be very small.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        let k = self.label_set.len();
        let kf = k as f64;
        let lq0 = self.unlabeled_density.log_density(x)?;
        let ln_w = self.w.ln();
        let ln_1mw = (1.0 - self.w).ln();
        let mut log_marginals = Vec::with_capacity(k);
        let mut max_ratio = f64::NEG_INFINITY;
        for ci in 0..k {
            let lq1 = self.class_densities[ci].log_density(x)?;
            let ratio = lq1 - lq0;
            if ratio > max_ratio {
                max_ratio = ratio;
            }
            let ln_qxy = logsumexp2(ln_w + lq1, ln_1mw + lq0);
            let qy = self.w * self.class_prior[ci] + (1.0 - self.w) / kf;
            log_marginals.push(ln_qxy + qy.ln());
        }
        let idx = argmax(&log_marginals);
        let m = log_marginals[idx];
        let unnorm: Vec<f64> = log_marginals.iter().map(|&v| (v - m).exp()).collect();
        let norm: f64 = unnorm.iter().sum();
        let posterior: Vec<f64> = unnorm.iter().map(|&v| v / norm).collect();
        let error_prob = 1.0 - posterior[idx];
        Ok(Prediction {
            label: self.label_set[idx],
            posterior,
            error_prob,
            in_region: max_ratio > self.kappa,
            log_marginals,
        })
    }

    /// Learned error probability at `x`; equals `predict(x).error_prob`.
    pub fn error_probability(&self, x: &[f64]) -> Result<f64> {
        Ok(self.predict(x)?.error_prob)
    }
}

/// Fits the initial models: one density per class and the class prior from
/// the labeled set, the pooled density from the unlabeled set. The returned
/// test carries the default threshold kappa = 0.
pub fn fit_initial_models(
    d1: &LabeledSet,
    d0: &UnlabeledSet,
    cfg: &VbConfig,
) -> Result<RegionTest> {
    cfg.validate()?;
    if d0.is_empty() {
        return Err(Error::EmptyData { min: 1, got: 0 });
    }
    if d0.dim() != d1.dim() {
        return Err(Error::DimMismatch {
            expected: d1.dim(),
            found: d0.dim(),
        });
    }
    let (densities, prior, _) = fit_class_models(d1, cfg, derive_seed(cfg.seed, STREAM_CLASSES))?;
    let unlabeled = fit_pool(d0.features(), cfg, derive_seed(cfg.seed, STREAM_POOL))?;
    RegionTest::new(d1.label_set().to_vec(), densities, prior, unlabeled, 0.0)
}

/// Draws a pseudo-label for every unlabeled point inside the region and
/// appends it to D'; the remaining points form D''.
///
/// The label is drawn from the labeled-data posterior
/// q(y|x) proportional to q(x|y, labeled) q(y| labeled), normalized in log
/// space. Each row uses its own hash-derived uniform, so the draw for a
/// given row does not depend on which other rows pass the region test.
pub fn selective_label_sample(
    region: &RegionTest,
    d1: &LabeledSet,
    d0: &UnlabeledSet,
    seed: u64,
) -> Result<(LabeledSet, UnlabeledSet)> {
    if d1.dim() != region.dim() || d0.dim() != region.dim() {
        return Err(Error::DimMismatch {
            expected: region.dim(),
            found: if d1.dim() != region.dim() { d1.dim() } else { d0.dim() },
        });
    }
    if region.labels() != d1.label_set() {
        return Err(Error::invalid(
            "region test and labeled set declare different label sets",
        ));
    }
    let k = region.labels().len();
    let log_prior: Vec<f64> = region.class_prior().iter().map(|&p| p.ln()).collect();
    let dim = d0.dim();
    let n0 = d0.len();

    let mut x = vec![0.0; dim];
    let mut weights = vec![0.0; k];
    let mut sampled: Vec<(usize, Label)> = Vec::new();
    let mut residual: Vec<usize> = Vec::new();
    for i in 0..n0 {
        for j in 0..dim {
            x[j] = d0.features()[(i, j)];
        }
        let lq0 = region.unlabeled_density().log_density(&x)?;
        let mut max_ratio = f64::NEG_INFINITY;
        for ci in 0..k {
            let lq1 = region.class_densities()[ci].log_density(&x)?;
            if lq1 - lq0 > max_ratio {
                max_ratio = lq1 - lq0;
            }
            weights[ci] = lq1 + log_prior[ci];
        }
        if max_ratio > region.kappa() {
            let m = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let unnorm: Vec<f64> = weights.iter().map(|&v| (v - m).exp()).collect();
            let total: f64 = unnorm.iter().sum();
            let u = unit_f64(derive_seed(seed, i as u64)) * total;
            let mut cum = 0.0;
            let mut pick = k - 1;
            for (ci, &p) in unnorm.iter().enumerate() {
                cum += p;
                if u < cum {
                    pick = ci;
                    break;
                }
            }
            sampled.push((i, region.labels()[pick]));
        } else {
            residual.push(i);
        }
    }

    let n1 = d1.len();
    let mut aug_features = DMatrix::zeros(n1 + sampled.len(), dim);
    let mut aug_labels = Vec::with_capacity(n1 + sampled.len());
    aug_features
        .view_mut((0, 0), (n1, dim))
        .copy_from(d1.features());
    aug_labels.extend_from_slice(d1.labels());
    for (r, &(i, label)) in sampled.iter().enumerate() {
        aug_features.set_row(n1 + r, &d0.features().row(i));
        aug_labels.push(label);
    }
    let dprime = LabeledSet::with_label_set(aug_features, aug_labels, d1.label_set().to_vec())?;

    let mut rest = DMatrix::zeros(residual.len(), dim);
    for (r, &i) in residual.iter().enumerate() {
        rest.set_row(r, &d0.features().row(i));
    }
    let dsecond = UnlabeledSet::new(rest)?;
    Ok((dprime, dsecond))
}

/// The proposed semi-supervised fit.
///
/// `seed` is the master seed; initialization, label-sampling and the final
/// refits draw from streams derived from it. An empty `d0` degenerates to
/// the supervised fit.
pub fn fit_mar(
    d1: &LabeledSet,
    d0: &UnlabeledSet,
    kappa: f64,
    cfg: &VbConfig,
    seed: u64,
) -> Result<MarModel> {
    cfg.validate()?;
    if kappa.is_nan() {
        return Err(Error::invalid("kappa must not be NaN"));
    }
    let (dprime, dresid) = if d0.is_empty() {
        (d1.clone(), None)
    } else {
        let init_cfg = cfg.with_seed(derive_seed(seed, STREAM_INIT));
        let region = fit_initial_models(d1, d0, &init_cfg)?.with_kappa(kappa);
        let (dp, dr) = selective_label_sample(&region, d1, d0, derive_seed(seed, STREAM_SAMPLE))?;
        let dr = if dr.is_empty() { None } else { Some(dr) };
        (dp, dr)
    };
    fit_final(&dprime, dresid.as_ref(), kappa, cfg, derive_seed(seed, STREAM_FINAL))
}

/// MCAR-style self-training baseline: label-samples every unlabeled point.
///
/// Implemented as [`fit_mar`] with kappa = -inf, so the identity between the
/// two holds prediction for prediction.
pub fn fit_mcar_selftrain(
    d1: &LabeledSet,
    d0: &UnlabeledSet,
    cfg: &VbConfig,
    seed: u64,
) -> Result<MarModel> {
    fit_mar(d1, d0, f64::NEG_INFINITY, cfg, seed)
}

/// Supervised baseline: class models and prior from the labeled set alone,
/// w = 1. Uses `cfg.seed` as master seed, so it coincides bit for bit with
/// `fit_mcar_selftrain(d1, empty, cfg, cfg.seed)`.
pub fn fit_supervised(d1: &LabeledSet, cfg: &VbConfig) -> Result<MarModel> {
    cfg.validate()?;
    fit_final(
        d1,
        None,
        f64::NEG_INFINITY,
        cfg,
        derive_seed(cfg.seed, STREAM_FINAL),
    )
}

fn fit_final(
    dprime: &LabeledSet,
    dresid: Option<&UnlabeledSet>,
    kappa: f64,
    cfg: &VbConfig,
    seed: u64,
) -> Result<MarModel> {
    let (densities, prior, counts) =
        fit_class_models(dprime, cfg, derive_seed(seed, STREAM_CLASSES))?;
    let unlabeled = match dresid {
        Some(dr) if !dr.is_empty() => fit_pool(dr.features(), cfg, derive_seed(seed, STREAM_POOL))?,
        // Unused in the mixture (1-w = 0); the pooled density keeps the
        // region test and serialization well-defined.
        _ => fit_gaussian(dprime.features(), cfg.reg_floor)?,
    };
    MarModel::new(
        dprime.label_set().to_vec(),
        densities,
        prior,
        counts,
        unlabeled,
        kappa,
        dprime.len(),
        dresid.map_or(0, |d| d.len()),
    )
}

/// Per-class densities and the class prior.
///
/// Classes with fewer than 3 d samples take the single-Gaussian path;
/// classes with no samples at all fall back to the pooled single Gaussian.
/// The prior is the empirical frequency, switched to add-one smoothing
/// whenever some declared class has zero count.
fn fit_class_models(
    d: &LabeledSet,
    cfg: &VbConfig,
    seed_base: u64,
) -> Result<(Vec<GmmDensity>, Vec<f64>, Vec<usize>)> {
    let min_class_samples = 3 * d.dim();
    let counts = d.class_counts();
    let mut densities: Vec<Option<GmmDensity>> = Vec::with_capacity(counts.len());
    for (ci, &label) in d.label_set().iter().enumerate() {
        if counts[ci] == 0 {
            densities.push(None);
            continue;
        }
        let rows = d.class_features(label);
        let g = if rows.nrows() < min_class_samples.max(2) {
            fit_gaussian(&rows, cfg.reg_floor)?
        } else {
            fit_vb_gmm(&rows, &cfg.with_seed(derive_seed(seed_base, ci as u64)))?.density
        };
        densities.push(Some(g));
    }
    let densities: Vec<GmmDensity> = if densities.iter().any(|g| g.is_none()) {
        let pooled = fit_gaussian(d.features(), cfg.reg_floor)?;
        densities
            .into_iter()
            .map(|g| g.unwrap_or_else(|| pooled.clone()))
            .collect()
    } else {
        densities.into_iter().map(|g| g.unwrap()).collect()
    };

    let n = d.len();
    let k = counts.len();
    let prior: Vec<f64> = if counts.contains(&0) {
        counts
            .iter()
            .map(|&c| (c + 1) as f64 / (n + k) as f64)
            .collect()
    } else {
        counts.iter().map(|&c| c as f64 / n as f64).collect()
    };
    Ok((densities, prior, counts))
}

fn fit_pool(features: &FeatureMatrix, cfg: &VbConfig, seed: u64) -> Result<GmmDensity> {
    if features.nrows() < (3 * features.ncols()).max(2) {
        fit_gaussian(features, cfg.reg_floor)
    } else {
        Ok(fit_vb_gmm(features, &cfg.with_seed(seed))?.density)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum KappaField {
    Num(f64),
    Text(String),
}

fn kappa_to_field(kappa: f64) -> KappaField {
    if kappa == f64::NEG_INFINITY {
        KappaField::Text("-inf".to_string())
    } else if kappa == f64::INFINITY {
        KappaField::Text("inf".to_string())
    } else {
        KappaField::Num(kappa)
    }
}

fn kappa_from_field(field: &KappaField) -> Result<f64> {
    match field {
        KappaField::Num(v) => Ok(*v),
        KappaField::Text(s) => match s.as_str() {
            "-inf" => Ok(f64::NEG_INFINITY),
            "inf" => Ok(f64::INFINITY),
            other => Err(Error::invalid(format!("unrecognized kappa value {other:?}"))),
        },
    }
}

#[derive(Serialize, Deserialize)]
struct MarModelRepr {
    label_set: Vec<Label>,
    class_densities: Vec<GmmDensity>,
    class_prior: Vec<f64>,
    class_counts: Vec<usize>,
    unlabeled_density: GmmDensity,
    w: f64,
    kappa: KappaField,
    augmented_count: usize,
    residual_count: usize,
}

impl From<MarModel> for MarModelRepr {
    fn from(m: MarModel) -> Self {
        MarModelRepr {
            label_set: m.label_set,
            class_densities: m.class_densities,
            class_prior: m.class_prior,
            class_counts: m.class_counts,
            unlabeled_density: m.unlabeled_density,
            w: m.w,
            kappa: kappa_to_field(m.kappa),
            augmented_count: m.augmented_count,
            residual_count: m.residual_count,
        }
    }
}

impl TryFrom<MarModelRepr> for MarModel {
    type Error = Error;

    fn try_from(repr: MarModelRepr) -> Result<Self> {
        let kappa = kappa_from_field(&repr.kappa)?;
        let model = MarModel::new(
            repr.label_set,
            repr.class_densities,
            repr.class_prior,
            repr.class_counts,
            repr.unlabeled_density,
            kappa,
            repr.augmented_count,
            repr.residual_count,
        )?;
        if repr.w != model.w {
            return Err(Error::invalid(
                "stored w does not equal augmented/(augmented+residual)",
            ));
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{gen_two_cluster_mar, TwoClusterConfig};
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn draw_blob(n: usize, mean: [f64; 2], scale: f64, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DMatrix::zeros(n, 2);
        for i in 0..n {
            for j in 0..2 {
                let z: f64 = rng.sample(StandardNormal);
                m[(i, j)] = mean[j] + scale * z;
            }
        }
        m
    }

    fn two_class_labeled(n_per: usize, sep: f64, scale: f64, seed: u64) -> LabeledSet {
        let a = draw_blob(n_per, [-sep / 2.0, 0.0], scale, seed);
        let b = draw_blob(n_per, [sep / 2.0, 0.0], scale, seed.wrapping_add(1));
        let mut feats = DMatrix::zeros(2 * n_per, 2);
        feats.view_mut((0, 0), (n_per, 2)).copy_from(&a);
        feats.view_mut((n_per, 0), (n_per, 2)).copy_from(&b);
        let labels: Vec<Label> = std::iter::repeat_n(0, n_per)
            .chain(std::iter::repeat_n(1, n_per))
            .collect();
        LabeledSet::new(feats, labels).unwrap()
    }

    fn shifted_scenario(seed: u64) -> (LabeledSet, UnlabeledSet) {
        let sc = gen_two_cluster_mar(&TwoClusterConfig {
            n_labeled: 400,
            n_unlabeled: 3000,
            cluster_separation: 10.0,
            class_boundary_axis: 0,
            noise_scale: 0.5,
            seed,
        })
        .unwrap();
        (sc.labeled, sc.unlabeled)
    }

    #[test]
    fn initial_models_single_class() {
        let d1 = LabeledSet::new(draw_blob(30, [0.0, 0.0], 1.0, 3), vec![7; 30]).unwrap();
        let d0 = UnlabeledSet::new(draw_blob(50, [0.0, 0.0], 1.0, 4)).unwrap();
        let region = fit_initial_models(&d1, &d0, &VbConfig::default()).unwrap();
        assert_eq!(region.labels(), &[7]);
        assert_eq!(region.class_prior(), &[1.0]);
        assert_eq!(region.kappa(), 0.0);
    }

    #[test]
    fn initial_models_mcar_like_ratio_near_zero() {
        // When D0 carries the same features as D1 the ratio statistic should
        // average out near zero over D1; classes must overlap for the pooled
        // model to track each class density.
        let d1 = two_class_labeled(1000, 1.0, 1.1, 11);
        let d0 = UnlabeledSet::new(d1.features().clone()).unwrap();
        let region = fit_initial_models(&d1, &d0, &VbConfig::default()).unwrap();
        let mut sum = 0.0;
        for i in 0..d1.len() {
            let x = [d1.features()[(i, 0)], d1.features()[(i, 1)]];
            sum += region.log_likelihood_ratio(&x).unwrap().0;
        }
        let mean = sum / d1.len() as f64;
        assert!(mean.abs() < 0.5, "mean ratio {mean}");
    }

    #[test]
    fn initial_models_unlabeled_mass_escapes_region() {
        let (d1, d0) = shifted_scenario(21);
        let region = fit_initial_models(&d1, &d0, &VbConfig::default()).unwrap();
        let draws = region.unlabeled_density().sample(2000, 77).unwrap();
        let mut outside = 0;
        for i in 0..draws.nrows() {
            if !region.in_region(&[draws[(i, 0)], draws[(i, 1)]]).unwrap() {
                outside += 1;
            }
        }
        let frac = outside as f64 / draws.nrows() as f64;
        assert!(frac >= 0.3, "only {frac} of unlabeled mass outside region");
    }

    #[test]
    fn far_cluster_draws_rarely_pass_the_region_test() {
        let (d1, d0) = shifted_scenario(22);
        let region = fit_initial_models(&d1, &d0, &VbConfig::default()).unwrap();
        // brute-force evaluation over draws from the unlabeled-only cluster
        let far = draw_blob(2000, [0.0, 10.0], 0.5, 23);
        let inside = (0..far.nrows())
            .filter(|&i| region.in_region(&[far[(i, 0)], far[(i, 1)]]).unwrap())
            .count();
        let frac = inside as f64 / far.nrows() as f64;
        assert!(frac < 0.05, "{frac} of far-cluster draws passed the test");
    }

    #[test]
    fn label_sample_empty_intersection() {
        let d1 = two_class_labeled(50, 6.0, 0.5, 31);
        let d0 = UnlabeledSet::new(draw_blob(80, [0.0, 20.0], 0.5, 32)).unwrap();
        let region = fit_initial_models(&d1, &d0, &VbConfig::default())
            .unwrap()
            .with_kappa(f64::INFINITY);
        let (dp, dr) = selective_label_sample(&region, &d1, &d0, 5).unwrap();
        assert_eq!(dp.features(), d1.features());
        assert_eq!(dp.labels(), d1.labels());
        assert_eq!(dr.features(), d0.features());
    }

    #[test]
    fn label_sample_everything_in_region() {
        let d1 = two_class_labeled(50, 6.0, 0.5, 41);
        let d0 = UnlabeledSet::new(draw_blob(80, [0.0, 0.0], 2.0, 42)).unwrap();
        let region = fit_initial_models(&d1, &d0, &VbConfig::default())
            .unwrap()
            .with_kappa(f64::NEG_INFINITY);
        let (dp, dr) = selective_label_sample(&region, &d1, &d0, 5).unwrap();
        assert_eq!(dp.len(), d1.len() + d0.len());
        assert!(dr.is_empty());
    }

    #[test]
    fn label_sample_conserves_counts() {
        let (d1, d0) = shifted_scenario(51);
        let region = fit_initial_models(&d1, &d0, &VbConfig::default()).unwrap();
        let (dp, dr) = selective_label_sample(&region, &d1, &d0, 9).unwrap();
        assert_eq!(dp.len() + dr.len(), d1.len() + d0.len());
    }

    #[test]
    fn label_sample_preserves_uncertainty() {
        // A point equidistant from two identical class densities with a
        // uniform prior must get each label about half the time across seeds.
        let g = GmmDensity::single(
            DVector::from_column_slice(&[0.0, 0.0]),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let region = RegionTest::new(
            vec![0, 1],
            vec![g.clone(), g.clone()],
            vec![0.5, 0.5],
            g,
            -1.0,
        )
        .unwrap();
        let d1 = LabeledSet::with_label_set(
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.1, 0.0]),
            vec![0, 1],
            vec![0, 1],
        )
        .unwrap();
        let d0 = UnlabeledSet::new(DMatrix::from_row_slice(1, 2, &[0.0, 0.0])).unwrap();
        let mut count_zero = 0usize;
        let trials = 10_000;
        for seed in 0..trials {
            let (dp, _) = selective_label_sample(&region, &d1, &d0, seed).unwrap();
            assert_eq!(dp.len(), 3);
            if dp.labels()[2] == 0 {
                count_zero += 1;
            }
        }
        let freq = count_zero as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.02, "label-0 frequency {freq}");
    }

    #[test]
    fn label_sample_is_monotone_in_kappa() {
        // With the same seed, the augmented pairs at a higher kappa are a
        // subset of those at a lower kappa.
        let (d1, d0) = shifted_scenario(61);
        let region = fit_initial_models(&d1, &d0, &VbConfig::default()).unwrap();
        let lo = region.clone().with_kappa(0.0);
        let hi = region.with_kappa(1.0);
        let (dp_lo, _) = selective_label_sample(&lo, &d1, &d0, 13).unwrap();
        let (dp_hi, _) = selective_label_sample(&hi, &d1, &d0, 13).unwrap();
        assert!(dp_hi.len() <= dp_lo.len());
        let pairs = |set: &LabeledSet| -> Vec<(Vec<u64>, Label)> {
            (0..set.len())
                .map(|i| {
                    (
                        (0..set.dim()).map(|j| set.features()[(i, j)].to_bits()).collect(),
                        set.labels()[i],
                    )
                })
                .collect()
        };
        let lo_pairs = pairs(&dp_lo);
        for pair in pairs(&dp_hi) {
            assert!(lo_pairs.contains(&pair), "pair in kappa=1 set missing at kappa=0");
        }
    }

    #[test]
    fn fit_mar_w_is_exact_count_ratio() {
        // kappa = +inf keeps every unlabeled point out of the region.
        let d1 = two_class_labeled(50, 4.0, 0.8, 71);
        let d0 = UnlabeledSet::new(draw_blob(900, [0.0, 12.0], 1.0, 72)).unwrap();
        let model = fit_mar(&d1, &d0, f64::INFINITY, &VbConfig::default(), 3).unwrap();
        assert_eq!(model.augmented_count(), 100);
        assert_eq!(model.residual_count(), 900);
        assert_eq!(model.w(), 0.1);
    }

    #[test]
    fn far_cluster_prediction_reduces_to_smoothed_supervised() {
        // All unlabeled mass far away and kappa large: the classifier is the
        // supervised one plus the (1-w) uniform smoothing term.
        let d1 = two_class_labeled(60, 4.0, 0.8, 81);
        let d0 = UnlabeledSet::new(draw_blob(600, [0.0, 15.0], 1.0, 82)).unwrap();
        let cfg = VbConfig::default();
        let model = fit_mar(&d1, &d0, 1e6, &cfg, 4).unwrap();
        assert_eq!(model.augmented_count(), d1.len());
        let w = model.w();
        for x in [[-2.0, 0.0], [2.0, 0.0], [0.0, 1.0]] {
            let pred = model.predict(&x).unwrap();
            // manual evaluation of the same mixture
            let lq0 = model.unlabeled_density().log_density(&x).unwrap();
            let mut manual: Vec<f64> = Vec::new();
            for (ci, g) in model.class_densities().iter().enumerate() {
                let qxy = w * g.log_density(&x).unwrap().exp() + (1.0 - w) * lq0.exp();
                let qy = w * model.class_prior()[ci] + (1.0 - w) / 2.0;
                manual.push(qxy * qy);
            }
            let total: f64 = manual.iter().sum();
            for ci in 0..2 {
                assert!((pred.posterior[ci] - manual[ci] / total).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn deep_unlabeled_region_floors_error_probability() {
        let (d1, d0) = shifted_scenario(91);
        let model = fit_mar(&d1, &d0, 0.0, &VbConfig::default(), 7).unwrap();
        // points deep inside the unlabeled-only cluster
        for x in [[0.0, 10.0], [0.5, 10.5], [-0.7, 9.5]] {
            let lq0 = model.unlabeled_density().log_density(&x).unwrap();
            let deep = model
                .class_densities()
                .iter()
                .all(|g| g.log_density(&x).unwrap() <= lq0 - 30.0);
            if !deep {
                continue;
            }
            let pred = model.predict(&x).unwrap();
            let floor = 1.0
                - model
                    .marginal_label_prior()
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
            assert!((pred.error_prob - floor).abs() < 1e-6);
            assert!((pred.error_prob - 0.5).abs() < 0.05, "error {}", pred.error_prob);
        }
    }

    #[test]
    fn predict_symmetric_model_is_uniform() {
        let g0 = GmmDensity::single(
            DVector::from_column_slice(&[-1.0, 0.0]),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let g1 = GmmDensity::single(
            DVector::from_column_slice(&[1.0, 0.0]),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let pool = GmmDensity::single(
            DVector::from_column_slice(&[0.0, 0.0]),
            DMatrix::identity(2, 2) * 4.0,
        )
        .unwrap();
        let model = MarModel::new(
            vec![0, 1],
            vec![g0, g1],
            vec![0.5, 0.5],
            vec![10, 10],
            pool,
            0.0,
            20,
            20,
        )
        .unwrap();
        let pred = model.predict(&[0.0, 3.0]).unwrap();
        assert!((pred.posterior[0] - 0.5).abs() < 1e-12);
        assert!((pred.posterior[1] - 0.5).abs() < 1e-12);
        assert!((pred.error_prob - 0.5).abs() < 1e-12);
    }

    #[test]
    fn predict_degenerate_single_class() {
        let d1 = LabeledSet::new(draw_blob(30, [1.0, 1.0], 0.5, 101), vec![3; 30]).unwrap();
        let model = fit_supervised(&d1, &VbConfig::default()).unwrap();
        assert_eq!(model.w(), 1.0);
        let pred = model.predict(&[1.0, 1.0]).unwrap();
        assert_eq!(pred.label, 3);
        assert_eq!(pred.posterior, vec![1.0]);
        assert_eq!(pred.error_prob, 0.0);
    }

    #[test]
    fn posterior_matches_naive_arithmetic() {
        let (d1, d0) = shifted_scenario(111);
        let model = fit_mar(&d1, &d0, 0.0, &VbConfig::default(), 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(999);
        let mut checked = 0;
        for _ in 0..100 {
            let x = [
                rng.random::<f64>() * 8.0 - 4.0,
                rng.random::<f64>() * 14.0 - 2.0,
            ];
            let naive: Vec<f64> = (0..2)
                .map(|ci| {
                    let q1 = model.class_densities()[ci].log_density(&x).unwrap().exp();
                    let q0 = model.unlabeled_density().log_density(&x).unwrap().exp();
                    let qxy = model.w() * q1 + (1.0 - model.w()) * q0;
                    let qy = model.w() * model.class_prior()[ci] + (1.0 - model.w()) / 2.0;
                    qxy * qy
                })
                .collect();
            let total: f64 = naive.iter().sum();
            if total <= f64::MIN_POSITIVE {
                continue; // naive arithmetic underflowed
            }
            let pred = model.predict(&x).unwrap();
            for ci in 0..2 {
                assert!(
                    (pred.posterior[ci] - naive[ci] / total).abs() < 1e-10,
                    "posterior mismatch at {x:?}"
                );
            }
            checked += 1;
        }
        assert!(checked > 50, "too few non-underflowing checks: {checked}");
    }

    #[test]
    fn error_probability_equals_one_minus_max_posterior() {
        let (d1, d0) = shifted_scenario(121);
        let model = fit_mar(&d1, &d0, 0.0, &VbConfig::default(), 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1000);
        for _ in 0..1000 {
            let x = [
                rng.random::<f64>() * 10.0 - 5.0,
                rng.random::<f64>() * 16.0 - 3.0,
            ];
            let pred = model.predict(&x).unwrap();
            let max = pred.posterior.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(pred.error_prob, 1.0 - max);
            assert_eq!(model.error_probability(&x).unwrap(), pred.error_prob);
            let sum: f64 = pred.posterior.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn uniform_posterior_error_probability() {
        // ten identical class densities and a uniform prior
        let g = GmmDensity::single(
            DVector::from_column_slice(&[0.0, 0.0]),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let model = MarModel::new(
            (0..10).collect(),
            vec![g.clone(); 10],
            vec![0.1; 10],
            vec![5; 10],
            g,
            0.0,
            50,
            0,
        )
        .unwrap();
        let e = model.error_probability(&[0.4, -0.2]).unwrap();
        assert!((e - 0.9).abs() < 1e-12);
    }

    #[test]
    fn mcar_with_empty_unlabeled_equals_supervised() {
        let d1 = two_class_labeled(40, 4.0, 1.0, 131);
        let cfg = VbConfig::default().with_seed(17);
        let sup = fit_supervised(&d1, &cfg).unwrap();
        let mcar = fit_mcar_selftrain(&d1, &UnlabeledSet::empty(2), &cfg, 17).unwrap();
        assert_eq!(
            serde_json::to_string(&sup).unwrap(),
            serde_json::to_string(&mcar).unwrap()
        );
    }

    #[test]
    fn mcar_nesting_equals_fit_mar_neg_infinity() {
        let (d1, d0) = shifted_scenario(141);
        let cfg = VbConfig::default();
        let a = fit_mcar_selftrain(&d1, &d0, &cfg, 23).unwrap();
        let b = fit_mar(&d1, &d0, f64::NEG_INFINITY, &cfg, 23).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x = [
                rng.random::<f64>() * 10.0 - 5.0,
                rng.random::<f64>() * 16.0 - 3.0,
            ];
            let pa = a.predict(&x).unwrap();
            let pb = b.predict(&x).unwrap();
            assert_eq!(pa.label, pb.label);
            assert_eq!(pa.posterior, pb.posterior);
            assert_eq!(pa.error_prob, pb.error_prob);
            assert_eq!(pa.in_region, pb.in_region);
        }
    }

    #[test]
    fn mcar_is_overconfident_in_far_cluster() {
        // The self-training baseline pseudo-labels the far cluster, refits on
        // those labels, and reports low error probabilities there even though
        // the true labels are split half and half.
        let cfg = TwoClusterConfig {
            n_labeled: 400,
            n_unlabeled: 3000,
            cluster_separation: 10.0,
            class_boundary_axis: 0,
            noise_scale: 0.5,
            seed: 151,
        };
        let sc = gen_two_cluster_mar(&cfg).unwrap();
        let model =
            fit_mcar_selftrain(&sc.labeled, &sc.unlabeled, &VbConfig::default(), 8).unwrap();
        let test = gen_two_cluster_mar(&TwoClusterConfig { seed: 152, ..cfg }).unwrap();
        let mut nominal = 0.0;
        let mut wrong = 0usize;
        let mut count = 0usize;
        for i in 0..test.unlabeled.len() {
            if !test.unlabeled_from_far_cluster[i] {
                continue;
            }
            let x = [
                test.unlabeled.features()[(i, 0)],
                test.unlabeled.features()[(i, 1)],
            ];
            let pred = model.predict(&x).unwrap();
            nominal += pred.error_prob;
            if pred.label != test.unlabeled_truth[i] {
                wrong += 1;
            }
            count += 1;
        }
        let nominal = nominal / count as f64;
        let empirical = wrong as f64 / count as f64;
        assert!(nominal < 0.2, "mean nominal error {nominal}");
        assert!((empirical - 0.5).abs() <= 0.15, "empirical error {empirical}");
    }

    #[test]
    fn mcar_split_does_not_hurt_accuracy() {
        // Under an MCAR split (no distribution shift) self-training must not
        // trail the supervised baseline by more than two points.
        let cfg = TwoClusterConfig {
            n_labeled: 200,
            n_unlabeled: 2000,
            cluster_separation: 0.0,
            class_boundary_axis: 0,
            noise_scale: 1.0,
            seed: 161,
        };
        let sc = gen_two_cluster_mar(&cfg).unwrap();
        let test = gen_two_cluster_mar(&TwoClusterConfig { seed: 162, ..cfg }).unwrap();
        let vb = VbConfig::default().with_seed(9);
        let mcar = fit_mcar_selftrain(&sc.labeled, &sc.unlabeled, &vb, 9).unwrap();
        let sup = fit_supervised(&sc.labeled, &vb).unwrap();
        let acc = |model: &MarModel| -> f64 {
            let mut good = 0usize;
            for i in 0..test.unlabeled.len() {
                let x = [
                    test.unlabeled.features()[(i, 0)],
                    test.unlabeled.features()[(i, 1)],
                ];
                if model.predict(&x).unwrap().label == test.unlabeled_truth[i] {
                    good += 1;
                }
            }
            good as f64 / test.unlabeled.len() as f64
        };
        let a_mcar = acc(&mcar);
        let a_sup = acc(&sup);
        assert!(
            a_mcar >= a_sup - 0.02,
            "self-training {a_mcar} vs supervised {a_sup}"
        );
    }

    #[test]
    fn supervised_one_sample_per_class() {
        let d1 = LabeledSet::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 5.0, 5.0]),
            vec![0, 1],
        )
        .unwrap();
        let model = fit_supervised(&d1, &VbConfig::default()).unwrap();
        assert_eq!(model.class_counts(), &[1, 1]);
        let pred = model.predict(&[0.1, 0.1]).unwrap();
        assert_eq!(pred.label, 0);
    }

    #[test]
    fn supervised_separable_classes_are_accurate() {
        // 6 sigma separation: Bayes risk about 0.13 percent.
        let d1 = two_class_labeled(500, 6.0, 1.0, 171);
        let model = fit_supervised(&d1, &VbConfig::default()).unwrap();
        let test = two_class_labeled(500, 6.0, 1.0, 411);
        let mut good = 0usize;
        for i in 0..test.len() {
            let x = [test.features()[(i, 0)], test.features()[(i, 1)]];
            if model.predict(&x).unwrap().label == test.labels()[i] {
                good += 1;
            }
        }
        let acc = good as f64 / test.len() as f64;
        assert!(acc >= 0.95, "accuracy {acc}");
    }

    #[test]
    fn supervised_prior_is_empirical_frequency() {
        let mut feats = draw_blob(100, [0.0, 0.0], 1.0, 181);
        for i in 30..100 {
            feats[(i, 0)] += 3.0;
        }
        let labels: Vec<Label> = (0..100).map(|i| u32::from(i >= 30)).collect();
        let d1 = LabeledSet::new(feats, labels).unwrap();
        let model = fit_supervised(&d1, &VbConfig::default()).unwrap();
        assert_eq!(model.class_prior(), &[0.3, 0.7]);
    }

    #[test]
    fn empty_class_gets_pooled_fallback_and_smoothed_prior() {
        let d1 = LabeledSet::with_label_set(
            draw_blob(40, [1.0, -1.0], 1.0, 191),
            vec![0; 40],
            vec![0, 1],
        )
        .unwrap();
        let model = fit_supervised(&d1, &VbConfig::default()).unwrap();
        assert_eq!(model.class_counts(), &[40, 0]);
        // add-one smoothing over 40 + 2 cells
        assert!((model.class_prior()[1] - 1.0 / 42.0).abs() < 1e-12);
        assert!((model.class_prior()[0] - 41.0 / 42.0).abs() < 1e-12);
        // the fallback density is the pooled single Gaussian
        let pooled = fit_gaussian(d1.features(), 1e-6).unwrap();
        for x in [[0.0, 0.0], [2.0, -1.0]] {
            assert_eq!(
                model.class_densities()[1].log_density(&x).unwrap(),
                pooled.log_density(&x).unwrap()
            );
        }
    }

    #[test]
    fn model_serde_round_trip_bit_exact() {
        let (d1, d0) = shifted_scenario(201);
        let model = fit_mar(&d1, &d0, 0.5, &VbConfig::default(), 12).unwrap();
        let json = serde_json::to_string(&model).unwrap();
        let back: MarModel = serde_json::from_str(&json).unwrap();
        assert_eq!(json, serde_json::to_string(&back).unwrap());
        for x in [[0.2, 0.4], [1.0, 9.0]] {
            let a = model.predict(&x).unwrap();
            let b = back.predict(&x).unwrap();
            assert_eq!(a.posterior, b.posterior);
            assert_eq!(a.error_prob, b.error_prob);
        }
        // negative-infinity kappa survives the trip
        let mcar = fit_mcar_selftrain(&d1, &d0, &VbConfig::default(), 12).unwrap();
        let json = serde_json::to_string(&mcar).unwrap();
        let back: MarModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back.kappa(), f64::NEG_INFINITY);
    }

    #[test]
    fn argmax_is_invariant_to_common_coordinate_rescaling() {
        // Rescaling all coordinates by c scales every density evaluation by
        // c^-d, which cancels in the posterior.
        let scale = 37.5;
        let gauss = |mean: [f64; 2], cov: [f64; 4]| {
            GmmDensity::single(
                DVector::from_column_slice(&mean),
                DMatrix::from_row_slice(2, 2, &cov),
            )
            .unwrap()
        };
        let base = MarModel::new(
            vec![0, 1],
            vec![
                gauss([-1.0, 0.3], [1.0, 0.2, 0.2, 0.7]),
                gauss([1.2, -0.1], [0.6, -0.1, -0.1, 1.3]),
            ],
            vec![0.4, 0.6],
            vec![40, 60],
            gauss([0.0, 5.0], [4.0, 0.0, 0.0, 9.0]),
            0.0,
            100,
            70,
        )
        .unwrap();
        let s2 = scale * scale;
        let scaled = MarModel::new(
            vec![0, 1],
            vec![
                gauss(
                    [-scale, 0.3 * scale],
                    [1.0 * s2, 0.2 * s2, 0.2 * s2, 0.7 * s2],
                ),
                gauss(
                    [1.2 * scale, -0.1 * scale],
                    [0.6 * s2, -0.1 * s2, -0.1 * s2, 1.3 * s2],
                ),
            ],
            vec![0.4, 0.6],
            vec![40, 60],
            gauss([0.0, 5.0 * scale], [4.0 * s2, 0.0, 0.0, 9.0 * s2]),
            0.0,
            100,
            70,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(271);
        for _ in 0..200 {
            let x = [
                rng.random::<f64>() * 8.0 - 4.0,
                rng.random::<f64>() * 12.0 - 3.0,
            ];
            let a = base.predict(&x).unwrap();
            let b = scaled.predict(&[x[0] * scale, x[1] * scale]).unwrap();
            assert_eq!(a.label, b.label);
            for ci in 0..2 {
                assert!((a.posterior[ci] - b.posterior[ci]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn labeled_set_rejects_label_outside_declared_set() {
        let feats = draw_blob(3, [0.0, 0.0], 1.0, 211);
        assert!(matches!(
            LabeledSet::with_label_set(feats, vec![0, 1, 2], vec![0, 1]),
            Err(Error::UnknownLabel(2))
        ));
    }
}
