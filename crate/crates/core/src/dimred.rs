//! PCA feature reduction.
//!
//! Stands in for a learned encoder in the reduce-then-estimate pipeline: the
//! downstream density models only need some low-dimensional representation,
//! and precomputed feature files remain usable through the CLI.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::{FeatureMatrix, Result};

/// An affine projection onto the top principal directions.
///
/// `basis` has orthonormal columns; `explained_variance` is non-increasing.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PcaMapRepr", into = "PcaMapRepr")]
pub struct PcaMap {
    mean: DVector<f64>,
    basis: DMatrix<f64>, // d x r
    explained_variance: DVector<f64>,
}

/// Result of [`fit_pca`]; `rank_clamped` flags that the requested dimension
/// exceeded the data rank and was reduced.
#[derive(Debug, Clone)]
pub struct PcaFit {
    pub map: PcaMap,
    pub rank_clamped: bool,
}

impl PcaMap {
    /// Input (ambient) dimension d.
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    /// Output (reduced) dimension r.
    pub fn output_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn explained_variance(&self) -> &DVector<f64> {
        &self.explained_variance
    }

    /// (data - mean) * basis, realized as an N x r matrix.
    pub fn transform(&self, data: &FeatureMatrix) -> Result<FeatureMatrix> {
        let d = self.input_dim();
        if data.ncols() != d {
            return Err(Error::DimMismatch {
                expected: d,
                found: data.ncols(),
            });
        }
        let mut centered = data.clone();
        for i in 0..centered.nrows() {
            for j in 0..d {
                centered[(i, j)] -= self.mean[j];
            }
        }
        Ok(centered * &self.basis)
    }

    /// Maps reduced rows back to the ambient space: low * basis^T + mean.
    pub fn inverse_transform(&self, low: &FeatureMatrix) -> Result<FeatureMatrix> {
        let r = self.output_dim();
        if low.ncols() != r {
            return Err(Error::DimMismatch {
                expected: r,
                found: low.ncols(),
            });
        }
        let mut out = low * self.basis.transpose();
        for i in 0..out.nrows() {
            for j in 0..self.input_dim() {
                out[(i, j)] += self.mean[j];
            }
        }
        Ok(out)
    }
}

/// Fits the top-`r` principal directions of the centered data.
///
/// Uses the d x d sample covariance when N >= d and the N x N Gram matrix
/// otherwise. Requires `1 <= r <= min(N-1, d)`; if `r` exceeds the numerical
/// rank of the data it is clamped and the fit is flagged. The sign of each
/// basis column is fixed so its largest-magnitude entry is positive.
pub fn fit_pca(data: &FeatureMatrix, r: usize) -> Result<PcaFit> {
    let n = data.nrows();
    let d = data.ncols();
    if n < 2 {
        return Err(Error::EmptyData { min: 2, got: n });
    }
    if r == 0 || r > (n - 1).min(d) {
        return Err(Error::invalid(format!(
            "target dimension {r} outside 1..=min(N-1, d) = {}",
            (n - 1).min(d)
        )));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("data must be finite"));
    }

    let mean = data.row_mean().transpose();
    let mut centered = data.clone();
    for i in 0..n {
        for j in 0..d {
            centered[(i, j)] -= mean[j];
        }
    }

    // Eigenpairs of the covariance, by descending eigenvalue.
    let (mut eigvals, mut eigvecs) = if n >= d {
        let cov = centered.transpose() * &centered / n as f64;
        let eig = SymmetricEigen::new(cov);
        sort_eig(eig.eigenvalues, eig.eigenvectors)
    } else {
        // Gram trick: nonzero spectrum of X'X/N equals that of XX'/N, and
        // covariance eigenvectors are X'u normalized.
        let gram = &centered * centered.transpose() / n as f64;
        let eig = SymmetricEigen::new(gram);
        let (vals, us) = sort_eig(eig.eigenvalues, eig.eigenvectors);
        let mut vecs = DMatrix::zeros(d, vals.len());
        for c in 0..vals.len() {
            let v = centered.transpose() * us.column(c);
            let norm = v.norm();
            if norm > 0.0 {
                vecs.set_column(c, &(v / norm));
            }
        }
        (vals, vecs)
    };

    let max_val = eigvals.iter().copied().fold(0.0_f64, f64::max);
    let rank_tol = max_val * 1e-12;
    let rank = eigvals.iter().filter(|&&v| v > rank_tol).count();
    let (effective_r, rank_clamped) = if rank == 0 {
        (1, true)
    } else if r > rank {
        (rank, true)
    } else {
        (r, false)
    };

    if rank == 0 {
        // All rows identical: any direction explains zero variance.
        let mut basis = DMatrix::zeros(d, 1);
        basis[(0, 0)] = 1.0;
        return Ok(PcaFit {
            map: PcaMap {
                mean,
                basis,
                explained_variance: DVector::zeros(1),
            },
            rank_clamped,
        });
    }

    eigvals = eigvals.rows(0, effective_r).into();
    eigvecs = eigvecs.columns(0, effective_r).into();
    for c in 0..effective_r {
        let col = eigvecs.column(c);
        let mut arg = 0;
        for i in 1..d {
            if col[i].abs() > col[arg].abs() {
                arg = i;
            }
        }
        if col[arg] < 0.0 {
            let neg = -eigvecs.column(c);
            eigvecs.set_column(c, &neg);
        }
    }
    let explained_variance = DVector::from_iterator(effective_r, eigvals.iter().map(|&v| v.max(0.0)));

    Ok(PcaFit {
        map: PcaMap {
            mean,
            basis: eigvecs,
            explained_variance,
        },
        rank_clamped,
    })
}

fn sort_eig(vals: DVector<f64>, vecs: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let sorted_vals = DVector::from_iterator(vals.len(), order.iter().map(|&i| vals[i]));
    let mut sorted_vecs = DMatrix::zeros(vecs.nrows(), vecs.ncols());
    for (c, &i) in order.iter().enumerate() {
        sorted_vecs.set_column(c, &vecs.column(i));
    }
    (sorted_vals, sorted_vecs)
}

#[derive(Serialize, Deserialize)]
struct PcaMapRepr {
    mean: Vec<f64>,
    basis: Vec<f64>, // row-major d x r
    explained_variance: Vec<f64>,
}

impl From<PcaMap> for PcaMapRepr {
    fn from(p: PcaMap) -> Self {
        let (d, r) = (p.input_dim(), p.output_dim());
        PcaMapRepr {
            mean: p.mean.iter().copied().collect(),
            basis: (0..d)
                .flat_map(|i| (0..r).map(move |j| (i, j)))
                .map(|(i, j)| p.basis[(i, j)])
                .collect(),
            explained_variance: p.explained_variance.iter().copied().collect(),
        }
    }
}

impl TryFrom<PcaMapRepr> for PcaMap {
    type Error = Error;

    fn try_from(repr: PcaMapRepr) -> Result<Self> {
        let d = repr.mean.len();
        let r = repr.explained_variance.len();
        if d == 0 || r == 0 || repr.basis.len() != d * r {
            return Err(Error::invalid("inconsistent PCA map shapes"));
        }
        let basis = DMatrix::from_row_slice(d, r, &repr.basis);
        let gram = basis.transpose() * &basis;
        if (gram - DMatrix::identity(r, r)).amax() > 1e-6 {
            return Err(Error::invalid("PCA basis columns are not orthonormal"));
        }
        Ok(PcaMap {
            mean: DVector::from_column_slice(&repr.mean),
            basis,
            explained_variance: DVector::from_column_slice(&repr.explained_variance),
        })
    }
}
