//! Gaussian mixture densities.
//!
//! [`GmmDensity`] is an immutable fitted mixture: weights, means and full
//! covariances, with per-component Cholesky factors cached so that
//! [`GmmDensity::log_density`] is cheap and stable far out in the tails.
//! Fitting goes through [`fit_vb_gmm`] (variational Bayes, the main path) or
//! [`fit_gaussian`] (single-Gaussian fast path for classes with few samples).

mod vb;

pub use vb::{fit_vb_gmm, VbConfig, VbGmmFit};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::math::logsumexp;
use crate::{FeatureMatrix, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// A fitted Gaussian mixture density over R^d.
///
/// Weights are positive and sum to one; covariances are symmetric positive
/// definite. The log-density of any finite vector is finite.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GmmDensityRepr", into = "GmmDensityRepr")]
pub struct GmmDensity {
    dim: usize,
    weights: Vec<f64>,
    means: Vec<DVector<f64>>,
    covariances: Vec<DMatrix<f64>>,
    // Cached per component: ln weight, lower Cholesky factor of the
    // covariance, and the Gaussian log-normalizer -(d ln 2pi + ln|S|)/2.
    log_weights: Vec<f64>,
    chol_lower: Vec<DMatrix<f64>>,
    log_norm: Vec<f64>,
}

impl GmmDensity {
    /// Builds a mixture from validated parts.
    ///
    /// Rejects empty mixtures, non-positive or badly normalized weights,
    /// inconsistent dimensions and covariances that are not symmetric
    /// positive definite.
    pub fn new(
        weights: Vec<f64>,
        means: Vec<DVector<f64>>,
        covariances: Vec<DMatrix<f64>>,
    ) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("mixture must have at least one component"));
        }
        if means.len() != weights.len() || covariances.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: weights.len(),
                right: means.len().max(covariances.len()),
            });
        }
        let dim = means[0].len();
        if dim == 0 {
            return Err(Error::invalid("feature dimension must be positive"));
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "weights must be positive and sum to 1 (sum = {sum})"
            )));
        }
        let mut chol_lower = Vec::with_capacity(weights.len());
        let mut log_norm = Vec::with_capacity(weights.len());
        for (mean, cov) in means.iter().zip(&covariances) {
            if mean.len() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: mean.len(),
                });
            }
            if cov.nrows() != dim || cov.ncols() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: cov.nrows().max(cov.ncols()),
                });
            }
            if mean.iter().any(|v| !v.is_finite()) || cov.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("mixture parameters must be finite"));
            }
            let asym = (cov - cov.transpose()).amax();
            let scale = cov.amax().max(1.0);
            if asym > 1e-9 * scale {
                return Err(Error::invalid("covariance is not symmetric"));
            }
            let chol = nalgebra::Cholesky::new(cov.clone())
                .ok_or_else(|| Error::invalid("covariance is not positive definite"))?;
            let l = chol.l();
            let log_det: f64 = l.diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0;
            log_norm.push(-0.5 * (dim as f64 * LN_2PI + log_det));
            chol_lower.push(l);
        }
        let log_weights = weights.iter().map(|w| w.ln()).collect();
        Ok(GmmDensity {
            dim,
            weights,
            means,
            covariances,
            log_weights,
            chol_lower,
            log_norm,
        })
    }

    /// Single-component mixture.
    pub fn single(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        Self::new(vec![1.0], vec![mean], vec![covariance])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_components(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[DVector<f64>] {
        &self.means
    }

    pub fn covariances(&self) -> &[DMatrix<f64>] {
        &self.covariances
    }

    /// ln sum_k w_k N(x; mean_k, cov_k) via log-sum-exp.
    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("input vector must be finite"));
        }
        let xv = DVector::from_column_slice(x);
        let mut terms = Vec::with_capacity(self.weights.len());
        for k in 0..self.weights.len() {
            let diff = &xv - &self.means[k];
            let y = self.chol_lower[k]
                .solve_lower_triangular(&diff)
                .expect("cached Cholesky factor has positive diagonal");
            terms.push(self.log_weights[k] + self.log_norm[k] - 0.5 * y.norm_squared());
        }
        Ok(logsumexp(&terms))
    }

    /// Draws `n` i.i.d. samples: component by weight, then a Gaussian draw
    /// through the cached Cholesky factor. Deterministic given `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<FeatureMatrix> {
        if n == 0 {
            return Err(Error::invalid("sample count must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = DMatrix::zeros(n, self.dim);
        for i in 0..n {
            let k = self.pick_component(rng.random::<f64>());
            let z = DVector::from_fn(self.dim, |_, _| rng.sample::<f64, _>(StandardNormal));
            let x = &self.means[k] + &self.chol_lower[k] * z;
            for j in 0..self.dim {
                out[(i, j)] = x[j];
            }
        }
        Ok(out)
    }

    fn pick_component(&self, u: f64) -> usize {
        let mut cum = 0.0;
        for (k, &w) in self.weights.iter().enumerate() {
            cum += w;
            if u < cum {
                return k;
            }
        }
        self.weights.len() - 1
    }
}

/// Sample mean and MLE covariance with eigenvalues clamped to `reg_floor`.
///
/// A single row yields its own coordinates as mean and `reg_floor * I` as
/// covariance, so very small classes still produce a usable density.
pub fn fit_gaussian(data: &FeatureMatrix, reg_floor: f64) -> Result<GmmDensity> {
    let n = data.nrows();
    let d = data.ncols();
    if n == 0 || d == 0 {
        return Err(Error::EmptyData { min: 1, got: n });
    }
    if !(reg_floor.is_finite() && reg_floor > 0.0) {
        return Err(Error::invalid("reg_floor must be positive"));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("data must be finite"));
    }
    let mean = data.row_mean().transpose();
    let mut cov = DMatrix::zeros(d, d);
    for i in 0..n {
        let diff = data.row(i).transpose() - &mean;
        cov += &diff * diff.transpose();
    }
    cov /= n as f64;
    let cov = clamp_spd(&cov, reg_floor);
    GmmDensity::single(mean, cov)
}

/// Symmetrizes `m` and clamps its eigenvalues from below at `floor`,
/// returning an exactly symmetric positive-definite matrix.
pub(crate) fn clamp_spd(m: &DMatrix<f64>, floor: f64) -> DMatrix<f64> {
    let d = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym.clone());
    if eig.eigenvalues.iter().all(|&l| l >= floor) {
        return symmetrize(sym);
    }
    let clamped = DVector::from_iterator(d, eig.eigenvalues.iter().map(|&l| l.max(floor)));
    let rebuilt = &eig.eigenvectors * DMatrix::from_diagonal(&clamped) * eig.eigenvectors.transpose();
    symmetrize(rebuilt)
}

fn symmetrize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let d = m.nrows();
    for i in 0..d {
        for j in (i + 1)..d {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

#[derive(Serialize, Deserialize)]
struct ComponentRepr {
    weight: f64,
    mean: Vec<f64>,
    covariance: Vec<f64>, // row-major d*d
}

#[derive(Serialize, Deserialize)]
struct GmmDensityRepr {
    dim: usize,
    components: Vec<ComponentRepr>,
}

impl From<GmmDensity> for GmmDensityRepr {
    fn from(g: GmmDensity) -> Self {
        let dim = g.dim;
        let components = g
            .weights
            .iter()
            .zip(&g.means)
            .zip(&g.covariances)
            .map(|((&weight, mean), cov)| ComponentRepr {
                weight,
                mean: mean.iter().copied().collect(),
                covariance: (0..dim)
                    .flat_map(|i| (0..dim).map(move |j| (i, j)))
                    .map(|(i, j)| cov[(i, j)])
                    .collect(),
            })
            .collect();
        GmmDensityRepr { dim, components }
    }
}

impl TryFrom<GmmDensityRepr> for GmmDensity {
    type Error = Error;

    fn try_from(repr: GmmDensityRepr) -> Result<Self> {
        let d = repr.dim;
        let mut weights = Vec::with_capacity(repr.components.len());
        let mut means = Vec::with_capacity(repr.components.len());
        let mut covs = Vec::with_capacity(repr.components.len());
        for c in repr.components {
            if c.mean.len() != d {
                return Err(Error::DimMismatch {
                    expected: d,
                    found: c.mean.len(),
                });
            }
            if c.covariance.len() != d * d {
                return Err(Error::DimMismatch {
                    expected: d * d,
                    found: c.covariance.len(),
                });
            }
            weights.push(c.weight);
            means.push(DVector::from_column_slice(&c.mean));
            covs.push(DMatrix::from_row_slice(d, d, &c.covariance));
        }
        GmmDensity::new(weights, means, covs)
    }
}
