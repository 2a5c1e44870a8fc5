//! Reliability evaluation: binned comparison of nominal error probabilities
//! against empirical error rates, expected calibration error, accuracy, and
//! the region-decomposed variant that separates rarely labeled points from
//! the rest.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::ssl::Prediction;
use crate::{Label, Result};

/// One equal-width bin over the nominal error probability.
///
/// `mean_nominal` and `empirical_error` are absent for empty bins, which are
/// still emitted so diagrams keep a fixed shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean_nominal: Option<f64>,
    pub empirical_error: Option<f64>,
}

/// Binned reliability statistics plus the count-weighted calibration gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityDiagram {
    pub bins: Vec<ReliabilityBin>,
    /// Count-weighted mean |mean_nominal - empirical_error| over occupied bins.
    pub ece: f64,
    pub overall_accuracy: f64,
}

/// Reliability statistics split by a per-point mask (rarely labeled points
/// vs the rest). A side is `None` when its subset is empty.
#[derive(Debug, Clone)]
pub struct RegionDecomposition {
    pub rare: Option<ReliabilityDiagram>,
    pub rest: Option<ReliabilityDiagram>,
}

/// Builds the reliability diagram of `predictions` against ground truth.
pub fn reliability_diagram(
    predictions: &[Prediction],
    truth: &[Label],
    n_bins: usize,
) -> Result<ReliabilityDiagram> {
    let (scores, correct) = extract(predictions, truth)?;
    reliability_from_scores(&scores, &correct, n_bins)
}

/// Same as [`reliability_diagram`] but from raw (error probability,
/// correctness) pairs; this is what file-based evaluation feeds.
pub fn reliability_from_scores(
    error_probs: &[f64],
    correct: &[bool],
    n_bins: usize,
) -> Result<ReliabilityDiagram> {
    if error_probs.len() != correct.len() {
        return Err(Error::LengthMismatch {
            left: error_probs.len(),
            right: correct.len(),
        });
    }
    if error_probs.is_empty() {
        return Err(Error::EmptyData { min: 1, got: 0 });
    }
    if n_bins == 0 {
        return Err(Error::invalid("n_bins must be at least 1"));
    }
    if error_probs.iter().any(|&q| !(0.0..=1.0).contains(&q)) {
        return Err(Error::invalid("error probabilities must lie in [0, 1]"));
    }
    let n = error_probs.len();
    let mut counts = vec![0usize; n_bins];
    let mut nominal_sum = vec![0.0f64; n_bins];
    let mut wrong = vec![0usize; n_bins];
    for (&q, &ok) in error_probs.iter().zip(correct) {
        let b = ((q * n_bins as f64) as usize).min(n_bins - 1);
        counts[b] += 1;
        nominal_sum[b] += q;
        if !ok {
            wrong[b] += 1;
        }
    }
    let mut bins = Vec::with_capacity(n_bins);
    let mut ece = 0.0;
    for b in 0..n_bins {
        let lo = b as f64 / n_bins as f64;
        let hi = (b + 1) as f64 / n_bins as f64;
        if counts[b] == 0 {
            bins.push(ReliabilityBin {
                lo,
                hi,
                count: 0,
                mean_nominal: None,
                empirical_error: None,
            });
        } else {
            let mean_nominal = nominal_sum[b] / counts[b] as f64;
            let empirical = wrong[b] as f64 / counts[b] as f64;
            ece += counts[b] as f64 / n as f64 * (mean_nominal - empirical).abs();
            bins.push(ReliabilityBin {
                lo,
                hi,
                count: counts[b],
                mean_nominal: Some(mean_nominal),
                empirical_error: Some(empirical),
            });
        }
    }
    let overall_accuracy = correct.iter().filter(|&&c| c).count() as f64 / n as f64;
    Ok(ReliabilityDiagram {
        bins,
        ece,
        overall_accuracy,
    })
}

/// Reliability statistics computed separately on the masked subset (rarely
/// labeled points) and its complement, with identical binning.
pub fn region_decomposed_errors(
    predictions: &[Prediction],
    truth: &[Label],
    rare_mask: &[bool],
    n_bins: usize,
) -> Result<RegionDecomposition> {
    if rare_mask.len() != predictions.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: rare_mask.len(),
        });
    }
    let (scores, correct) = extract(predictions, truth)?;
    let side = |want: bool| -> Result<Option<ReliabilityDiagram>> {
        let qs: Vec<f64> = scores
            .iter()
            .zip(rare_mask)
            .filter(|(_, &m)| m == want)
            .map(|(&q, _)| q)
            .collect();
        if qs.is_empty() {
            return Ok(None);
        }
        let oks: Vec<bool> = correct
            .iter()
            .zip(rare_mask)
            .filter(|(_, &m)| m == want)
            .map(|(&c, _)| c)
            .collect();
        reliability_from_scores(&qs, &oks, n_bins).map(Some)
    };
    Ok(RegionDecomposition {
        rare: side(true)?,
        rest: side(false)?,
    })
}

/// Fraction of predictions whose label matches the truth.
pub fn accuracy(predictions: &[Prediction], truth: &[Label]) -> Result<f64> {
    let (_, correct) = extract(predictions, truth)?;
    Ok(correct.iter().filter(|&&c| c).count() as f64 / correct.len() as f64)
}

fn extract(predictions: &[Prediction], truth: &[Label]) -> Result<(Vec<f64>, Vec<bool>)> {
    if predictions.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: truth.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyData { min: 1, got: 0 });
    }
    let scores = predictions.iter().map(|p| p.error_prob).collect();
    let correct = predictions
        .iter()
        .zip(truth)
        .map(|(p, &t)| p.label == t)
        .collect();
    Ok((scores, correct))
}

impl ReliabilityDiagram {
    /// Number of evaluated points.
    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    /// Combines two diagrams computed with identical binning on disjoint
    /// subsets; counts add exactly, means merge count-weighted.
    pub fn merge(&self, other: &ReliabilityDiagram) -> Result<ReliabilityDiagram> {
        if self.bins.len() != other.bins.len() {
            return Err(Error::LengthMismatch {
                left: self.bins.len(),
                right: other.bins.len(),
            });
        }
        let n = (self.total_count() + other.total_count()) as f64;
        let mut bins = Vec::with_capacity(self.bins.len());
        let mut ece = 0.0;
        for (a, b) in self.bins.iter().zip(&other.bins) {
            if a.lo != b.lo || a.hi != b.hi {
                return Err(Error::invalid("diagrams use different bin edges"));
            }
            let count = a.count + b.count;
            let wmean = |ma: Option<f64>, mb: Option<f64>| -> Option<f64> {
                match (ma, mb) {
                    (None, None) => None,
                    (Some(x), None) => Some(x),
                    (None, Some(y)) => Some(y),
                    (Some(x), Some(y)) => {
                        Some((x * a.count as f64 + y * b.count as f64) / count as f64)
                    }
                }
            };
            let mean_nominal = wmean(a.mean_nominal, b.mean_nominal);
            let empirical_error = wmean(a.empirical_error, b.empirical_error);
            if let (Some(m), Some(e)) = (mean_nominal, empirical_error) {
                ece += count as f64 / n * (m - e).abs();
            }
            bins.push(ReliabilityBin {
                lo: a.lo,
                hi: a.hi,
                count,
                mean_nominal,
                empirical_error,
            });
        }
        let overall_accuracy = (self.overall_accuracy * self.total_count() as f64
            + other.overall_accuracy * other.total_count() as f64)
            / n;
        Ok(ReliabilityDiagram {
            bins,
            ece,
            overall_accuracy,
        })
    }

    /// CSV rows bin_lo,bin_hi,count,mean_nominal,empirical_error; absent
    /// values are empty cells.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count,mean_nominal,empirical_error\n");
        for b in &self.bins {
            let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                b.lo,
                b.hi,
                b.count,
                fmt(b.mean_nominal),
                fmt(b.empirical_error)
            ));
        }
        out
    }
}
