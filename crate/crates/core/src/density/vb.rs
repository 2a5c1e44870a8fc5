//! Variational Bayes fitting of Gaussian mixtures.
//!
//! Conjugate model: Dirichlet prior on the weights, Gaussian-Wishart prior on
//! each component's mean and precision. Coordinate ascent alternates
//! responsibilities and posterior parameters; the evidence lower bound is
//! tracked every iteration and is non-decreasing up to round-off. A sparse
//! Dirichlet concentration empties redundant components, which are pruned
//! from the returned density.
//!
//! Rows are reordered into a canonical (lexicographic) order before any
//! arithmetic, so the fit is independent of input row order and bitwise
//! reproducible for a given seed.

use std::cmp::Ordering;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::Error;
use crate::math::logsumexp;
use crate::{FeatureMatrix, Result};

use super::{clamp_spd, GmmDensity};

const LN_2PI: f64 = 1.837_877_066_409_345_5;
const LN_2: f64 = std::f64::consts::LN_2;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Hyperparameters for [`fit_vb_gmm`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct VbConfig {
    /// Upper bound on the number of mixture components.
    pub max_components: usize,
    /// Dirichlet concentration of the weight prior; small values favor
    /// emptying unused components.
    pub dirichlet_concentration: f64,
    /// Scale of the Gaussian prior on component means (beta_0).
    pub prior_mean_scale: f64,
    /// Added to the feature dimension to form the Wishart degrees of freedom.
    pub wishart_dof_offset: f64,
    /// Maximum number of variational iterations.
    pub max_iters: usize,
    /// Convergence threshold on the ELBO change, relative to max(1, |ELBO|).
    pub elbo_tol: f64,
    /// Smallest admissible covariance eigenvalue in the returned density.
    pub reg_floor: f64,
    /// Seed for the k-means++ initialization.
    pub seed: u64,
}

impl Default for VbConfig {
    fn default() -> Self {
        VbConfig {
            max_components: 10,
            dirichlet_concentration: 0.1,
            prior_mean_scale: 1.0,
            wishart_dof_offset: 0.0,
            max_iters: 200,
            elbo_tol: 1e-5,
            reg_floor: 1e-6,
            seed: 0,
        }
    }
}

impl VbConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_components == 0 {
            return Err(Error::invalid("max_components must be at least 1"));
        }
        if !(self.dirichlet_concentration.is_finite() && self.dirichlet_concentration > 0.0) {
            return Err(Error::invalid("dirichlet_concentration must be positive"));
        }
        if !(self.prior_mean_scale.is_finite() && self.prior_mean_scale > 0.0) {
            return Err(Error::invalid("prior_mean_scale must be positive"));
        }
        if !(self.wishart_dof_offset.is_finite() && self.wishart_dof_offset >= 0.0) {
            return Err(Error::invalid("wishart_dof_offset must be non-negative"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if !(self.elbo_tol.is_finite() && self.elbo_tol > 0.0) {
            return Err(Error::invalid("elbo_tol must be positive"));
        }
        if !(self.reg_floor.is_finite() && self.reg_floor > 0.0) {
            return Err(Error::invalid("reg_floor must be positive"));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> VbConfig {
        VbConfig { seed, ..self.clone() }
    }
}

/// Outcome of a variational fit.
#[derive(Debug, Clone)]
pub struct VbGmmFit {
    /// The fitted density after pruning and covariance regularization.
    pub density: GmmDensity,
    /// ELBO value after each iteration.
    pub elbo_trace: Vec<f64>,
    /// Whether the ELBO change fell below the tolerance before `max_iters`.
    pub converged: bool,
    /// All rows were identical; a single regularized component was returned.
    pub degenerate_data: bool,
}

struct Flat {
    x: Vec<f64>, // row-major, canonical order
    n: usize,
    d: usize,
}

impl Flat {
    fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }
}

struct Prior {
    alpha0: f64,
    beta0: f64,
    nu0: f64,
    m0: DVector<f64>,
    w0_inv: DMatrix<f64>,
    ln_det_w0: f64,
}

struct Params {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    nu: Vec<f64>,
    m: Vec<DVector<f64>>,
    w: Vec<DMatrix<f64>>,
    w_inv: Vec<DMatrix<f64>>,
    ln_det_w: Vec<f64>,
    e_ln_pi: Vec<f64>,
    e_ln_det: Vec<f64>,
}

struct Moments {
    nk: Vec<f64>,
    xbar: Vec<DVector<f64>>,
    sk: Vec<DMatrix<f64>>,
}

/// Fits a Gaussian mixture to `data` by variational Bayes.
///
/// Needs at least two rows; identical rows short-circuit into a
/// single-component density with `reg_floor * I` covariance, flagged via
/// [`VbGmmFit::degenerate_data`]. Deterministic given `(data, cfg)` and
/// invariant to row permutations.
pub fn fit_vb_gmm(data: &FeatureMatrix, cfg: &VbConfig) -> Result<VbGmmFit> {
    cfg.validate()?;
    let n = data.nrows();
    let d = data.ncols();
    if n < 2 {
        return Err(Error::EmptyData { min: 2, got: n });
    }
    if d == 0 {
        return Err(Error::invalid("feature dimension must be positive"));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("data must be finite"));
    }

    let flat = canonicalize(data);
    if all_rows_identical(&flat) {
        let mean = DVector::from_column_slice(flat.row(0));
        let cov = DMatrix::identity(d, d) * cfg.reg_floor;
        return Ok(VbGmmFit {
            density: GmmDensity::single(mean, cov)?,
            elbo_trace: Vec::new(),
            converged: true,
            degenerate_data: true,
        });
    }

    let k = cfg.max_components.min(n);
    let prior = build_prior(&flat, cfg);
    let mut resp = init_responsibilities(&flat, k, cfg.seed);
    let mut params = m_step(&prior, &moments(&flat, &resp, k, &prior));

    let mut trace: Vec<f64> = Vec::with_capacity(cfg.max_iters);
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        let neg_entropy = e_step(&flat, &params, &mut resp);
        let mom = moments(&flat, &resp, k, &prior);
        let elbo = compute_elbo(&prior, &params, &mom, neg_entropy, d);
        if let Some(&prev) = trace.last() {
            if (elbo - prev).abs() < cfg.elbo_tol * elbo.abs().max(1.0) {
                trace.push(elbo);
                converged = true;
                break;
            }
        }
        trace.push(elbo);
        params = m_step(&prior, &mom);
    }

    let density = extract_density(&params, n, cfg.reg_floor)?;
    Ok(VbGmmFit {
        density,
        elbo_trace: trace,
        converged,
        degenerate_data: false,
    })
}

fn canonicalize(data: &FeatureMatrix) -> Flat {
    let n = data.nrows();
    let d = data.ncols();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        for j in 0..d {
            let c = data[(a, j)].total_cmp(&data[(b, j)]);
            if c != Ordering::Equal {
                return c;
            }
        }
        Ordering::Equal
    });
    let mut x = Vec::with_capacity(n * d);
    for &i in &order {
        for j in 0..d {
            x.push(data[(i, j)]);
        }
    }
    Flat { x, n, d }
}

fn all_rows_identical(flat: &Flat) -> bool {
    let first = flat.row(0);
    (1..flat.n).all(|i| flat.row(i) == first)
}

fn build_prior(flat: &Flat, cfg: &VbConfig) -> Prior {
    let (n, d) = (flat.n, flat.d);
    let mut m0 = DVector::zeros(d);
    for i in 0..n {
        for j in 0..d {
            m0[j] += flat.x[i * d + j];
        }
    }
    m0 /= n as f64;
    let mut s = DMatrix::zeros(d, d);
    for i in 0..n {
        let row = flat.row(i);
        for a in 0..d {
            let da = row[a] - m0[a];
            for b in 0..d {
                s[(a, b)] += da * (row[b] - m0[b]);
            }
        }
    }
    s /= n as f64;
    let nu0 = d as f64 + cfg.wishart_dof_offset;
    // Expected prior precision matches the inverse data covariance.
    let w0_inv = (s + DMatrix::identity(d, d) * cfg.reg_floor) * nu0;
    let ln_det_w0 = -ln_det_spd(&w0_inv);
    Prior {
        alpha0: cfg.dirichlet_concentration,
        beta0: cfg.prior_mean_scale,
        nu0,
        m0,
        w0_inv,
        ln_det_w0,
    }
}

fn ln_det_spd(m: &DMatrix<f64>) -> f64 {
    let chol = Cholesky::new(m.clone()).expect("matrix must be positive definite");
    chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0
}

/// k-means++ seeding over the canonical row order, then hard assignment.
fn init_responsibilities(flat: &Flat, k: usize, seed: u64) -> Vec<f64> {
    let n = flat.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(flat.row(rng.random_range(0..n)).to_vec());
    let mut dist2: Vec<f64> = (0..n)
        .map(|i| sq_dist(flat.row(i), &centers[0]))
        .collect();
    while centers.len() < k {
        let total: f64 = dist2.iter().sum();
        let idx = if total > 0.0 {
            let t = rng.random::<f64>() * total;
            let mut cum = 0.0;
            let mut pick = n - 1;
            for (i, &w) in dist2.iter().enumerate() {
                cum += w;
                if t < cum {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        let c = flat.row(idx).to_vec();
        for i in 0..n {
            let d2 = sq_dist(flat.row(i), &c);
            if d2 < dist2[i] {
                dist2[i] = d2;
            }
        }
        centers.push(c);
    }
    let mut resp = vec![0.0; n * k];
    for i in 0..n {
        let row = flat.row(i);
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, center) in centers.iter().enumerate() {
            let d2 = sq_dist(row, center);
            if d2 < best_d {
                best_d = d2;
                best = c;
            }
        }
        resp[i * k + best] = 1.0;
    }
    resp
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn moments(flat: &Flat, resp: &[f64], k: usize, prior: &Prior) -> Moments {
    let (n, d) = (flat.n, flat.d);
    let mut nk = vec![0.0; k];
    let mut xbar = vec![DVector::zeros(d); k];
    for i in 0..n {
        let row = flat.row(i);
        for c in 0..k {
            let r = resp[i * k + c];
            if r > 0.0 {
                nk[c] += r;
                for j in 0..d {
                    xbar[c][j] += r * row[j];
                }
            }
        }
    }
    for c in 0..k {
        if nk[c] > 1e-300 {
            xbar[c] /= nk[c];
        } else {
            xbar[c] = prior.m0.clone();
        }
    }
    let mut sk = vec![DMatrix::zeros(d, d); k];
    for i in 0..n {
        let row = flat.row(i);
        for c in 0..k {
            let r = resp[i * k + c];
            if r > 0.0 {
                for a in 0..d {
                    let da = row[a] - xbar[c][a];
                    for b in 0..=a {
                        sk[c][(a, b)] += r * da * (row[b] - xbar[c][b]);
                    }
                }
            }
        }
    }
    for c in 0..k {
        if nk[c] > 1e-300 {
            sk[c] /= nk[c];
        } else {
            sk[c].fill(0.0);
        }
        for a in 0..d {
            for b in (a + 1)..d {
                sk[c][(a, b)] = sk[c][(b, a)];
            }
        }
    }
    Moments { nk, xbar, sk }
}

fn m_step(prior: &Prior, mom: &Moments) -> Params {
    let k = mom.nk.len();
    let d = prior.m0.len();
    let mut alpha = Vec::with_capacity(k);
    let mut beta = Vec::with_capacity(k);
    let mut nu = Vec::with_capacity(k);
    let mut m = Vec::with_capacity(k);
    let mut w = Vec::with_capacity(k);
    let mut w_inv = Vec::with_capacity(k);
    let mut ln_det_w = Vec::with_capacity(k);
    for c in 0..k {
        let nk = mom.nk[c];
        let a = prior.alpha0 + nk;
        let b = prior.beta0 + nk;
        let v = prior.nu0 + nk;
        let mk = (&prior.m0 * prior.beta0 + &mom.xbar[c] * nk) / b;
        let dx = &mom.xbar[c] - &prior.m0;
        let winv = &prior.w0_inv
            + &mom.sk[c] * nk
            + &dx * dx.transpose() * (prior.beta0 * nk / (prior.beta0 + nk));
        let chol = Cholesky::new(winv.clone()).expect("posterior scale must be positive definite");
        let ldw = -(chol.l().diagonal().iter().map(|x| x.ln()).sum::<f64>() * 2.0);
        let wk = chol.inverse();
        alpha.push(a);
        beta.push(b);
        nu.push(v);
        m.push(mk);
        w.push(wk);
        w_inv.push(winv);
        ln_det_w.push(ldw);
    }
    let alpha_sum: f64 = alpha.iter().sum();
    let dig_sum = digamma(alpha_sum);
    let e_ln_pi: Vec<f64> = alpha.iter().map(|&a| digamma(a) - dig_sum).collect();
    let e_ln_det: Vec<f64> = (0..k)
        .map(|c| {
            (0..d)
                .map(|j| digamma(0.5 * (nu[c] - j as f64)))
                .sum::<f64>()
                + d as f64 * LN_2
                + ln_det_w[c]
        })
        .collect();
    Params {
        alpha,
        beta,
        nu,
        m,
        w,
        w_inv,
        ln_det_w,
        e_ln_pi,
        e_ln_det,
    }
}

/// Updates responsibilities in place; returns sum_ik r_ik ln r_ik.
fn e_step(flat: &Flat, params: &Params, resp: &mut [f64]) -> f64 {
    let (n, d) = (flat.n, flat.d);
    let k = params.alpha.len();
    let df = d as f64;
    let mut lnrho = vec![0.0; k];
    let mut diff = vec![0.0; d];
    let mut neg_entropy = 0.0;
    for i in 0..n {
        let row = flat.row(i);
        for c in 0..k {
            for j in 0..d {
                diff[j] = row[j] - params.m[c][j];
            }
            let quad = params.nu[c] * quad_form(&params.w[c], &diff);
            lnrho[c] = params.e_ln_pi[c] + 0.5 * params.e_ln_det[c]
                - 0.5 * df * LN_2PI
                - 0.5 * (df / params.beta[c] + quad);
        }
        let norm = logsumexp(&lnrho);
        for c in 0..k {
            let lr = lnrho[c] - norm;
            let r = lr.exp();
            resp[i * k + c] = r;
            if r > 0.0 {
                neg_entropy += r * lr;
            }
        }
    }
    neg_entropy
}

fn quad_form(w: &DMatrix<f64>, diff: &[f64]) -> f64 {
    let d = diff.len();
    let mut q = 0.0;
    for a in 0..d {
        let mut row = 0.0;
        for b in 0..d {
            row += w[(a, b)] * diff[b];
        }
        q += diff[a] * row;
    }
    q
}

fn ln_c_dirichlet(alpha: &[f64]) -> f64 {
    let sum: f64 = alpha.iter().sum();
    ln_gamma(sum) - alpha.iter().map(|&a| ln_gamma(a)).sum::<f64>()
}

fn ln_wishart_b(ln_det_w: f64, nu: f64, d: usize) -> f64 {
    let df = d as f64;
    let mut lg = 0.0;
    for j in 0..d {
        lg += ln_gamma(0.5 * (nu - j as f64));
    }
    -0.5 * nu * ln_det_w - 0.5 * nu * df * LN_2 - 0.25 * df * (df - 1.0) * LN_PI - lg
}

fn trace_prod_sym(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn compute_elbo(prior: &Prior, params: &Params, mom: &Moments, neg_entropy: f64, d: usize) -> f64 {
    let k = params.alpha.len();
    let df = d as f64;

    let mut t1 = 0.0;
    for c in 0..k {
        let tr_sw = trace_prod_sym(&mom.sk[c], &params.w[c]);
        let mut dx = vec![0.0; d];
        for j in 0..d {
            dx[j] = mom.xbar[c][j] - params.m[c][j];
        }
        let quad = quad_form(&params.w[c], &dx);
        t1 += mom.nk[c]
            * (params.e_ln_det[c] - df / params.beta[c]
                - params.nu[c] * tr_sw
                - params.nu[c] * quad
                - df * LN_2PI);
    }
    t1 *= 0.5;

    let t2: f64 = (0..k).map(|c| mom.nk[c] * params.e_ln_pi[c]).sum();

    let sum_e_ln_pi: f64 = params.e_ln_pi.iter().sum();
    let t3 = ln_c_dirichlet(&vec![prior.alpha0; k]) + (prior.alpha0 - 1.0) * sum_e_ln_pi;

    let sum_e_ln_det: f64 = params.e_ln_det.iter().sum();
    let mut t4 = 0.0;
    for c in 0..k {
        let mut dm = vec![0.0; d];
        for j in 0..d {
            dm[j] = params.m[c][j] - prior.m0[j];
        }
        let quad = quad_form(&params.w[c], &dm);
        t4 += df * (prior.beta0 / (2.0 * std::f64::consts::PI)).ln() + params.e_ln_det[c]
            - df * prior.beta0 / params.beta[c]
            - prior.beta0 * params.nu[c] * quad;
    }
    t4 *= 0.5;
    t4 += k as f64 * ln_wishart_b(prior.ln_det_w0, prior.nu0, d);
    t4 += 0.5 * (prior.nu0 - df - 1.0) * sum_e_ln_det;
    for c in 0..k {
        t4 -= 0.5 * params.nu[c] * trace_prod_sym(&prior.w0_inv, &params.w[c]);
    }

    let t5 = neg_entropy;

    let t6: f64 = (0..k)
        .map(|c| (params.alpha[c] - 1.0) * params.e_ln_pi[c])
        .sum::<f64>()
        + ln_c_dirichlet(&params.alpha);

    let mut t7 = 0.0;
    for c in 0..k {
        let h_wishart = -ln_wishart_b(params.ln_det_w[c], params.nu[c], d)
            - 0.5 * (params.nu[c] - df - 1.0) * params.e_ln_det[c]
            + 0.5 * params.nu[c] * df;
        t7 += 0.5 * params.e_ln_det[c] + 0.5 * df * (params.beta[c] / (2.0 * std::f64::consts::PI)).ln()
            - 0.5 * df
            - h_wishart;
    }

    t1 + t2 + t3 + t4 - t5 - t6 - t7
}

/// Point estimates plus pruning of components whose posterior weight fell
/// below 1/(10 n).
fn extract_density(params: &Params, n: usize, reg_floor: f64) -> Result<GmmDensity> {
    let k = params.alpha.len();
    let alpha_sum: f64 = params.alpha.iter().sum();
    let weights: Vec<f64> = params.alpha.iter().map(|&a| a / alpha_sum).collect();
    let prune = 1.0 / (10.0 * n as f64);
    let top = crate::math::argmax(&weights);
    let mut kept_w = Vec::new();
    let mut kept_m = Vec::new();
    let mut kept_c = Vec::new();
    for c in 0..k {
        if weights[c] >= prune || c == top {
            kept_w.push(weights[c]);
            kept_m.push(params.m[c].clone());
            let cov = &params.w_inv[c] / params.nu[c];
            kept_c.push(clamp_spd(&cov, reg_floor));
        }
    }
    let total: f64 = kept_w.iter().sum();
    for w in &mut kept_w {
        *w /= total;
    }
    GmmDensity::new(kept_w, kept_m, kept_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::StandardNormal;

    fn draw_gaussian(n: usize, mean: &[f64], scale: f64, seed: u64) -> FeatureMatrix {
        let d = mean.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DMatrix::zeros(n, d);
        for i in 0..n {
            for j in 0..d {
                let z: f64 = rng.sample(StandardNormal);
                m[(i, j)] = mean[j] + scale * z;
            }
        }
        m
    }

    fn vstack(a: &FeatureMatrix, b: &FeatureMatrix) -> FeatureMatrix {
        let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
        out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
        out.view_mut((a.nrows(), 0), (b.nrows(), b.ncols())).copy_from(b);
        out
    }

    /// Midpoint-rule mass of a 2-d density over a box covering +-8 sd of
    /// every component.
    fn grid_mass(g: &GmmDensity, steps: usize) -> f64 {
        assert_eq!(g.dim(), 2);
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for (mean, cov) in g.means().iter().zip(g.covariances()) {
            let eig = nalgebra::SymmetricEigen::new(cov.clone());
            let sd = eig.eigenvalues.max().sqrt();
            for j in 0..2 {
                lo[j] = lo[j].min(mean[j] - 8.0 * sd);
                hi[j] = hi[j].max(mean[j] + 8.0 * sd);
            }
        }
        let hx = (hi[0] - lo[0]) / steps as f64;
        let hy = (hi[1] - lo[1]) / steps as f64;
        let mut mass = 0.0;
        for i in 0..steps {
            let x = lo[0] + (i as f64 + 0.5) * hx;
            for j in 0..steps {
                let y = lo[1] + (j as f64 + 0.5) * hy;
                mass += g.log_density(&[x, y]).unwrap().exp();
            }
        }
        mass * hx * hy
    }

    #[test]
    fn single_blob_yields_dominant_component() {
        // Redundant components drain slowly, so parameter-recovery checks run
        // with a long iteration budget and a tight tolerance.
        let data = draw_gaussian(2000, &[0.0, 0.0], 1.0, 5);
        let cfg = VbConfig {
            max_components: 8,
            max_iters: 10_000,
            elbo_tol: 1e-9,
            ..VbConfig::default()
        };
        let fit = fit_vb_gmm(&data, &cfg).unwrap();
        let g = &fit.density;
        let top = crate::math::argmax(g.weights());
        assert!(
            g.weights()[top] >= 0.95,
            "dominant weight {}",
            g.weights()[top]
        );
        // oracle: sample mean of the same draws
        let sample_mean = data.row_mean().transpose();
        assert!((&g.means()[top] - &sample_mean).norm() < 0.1);
        assert!(g.means()[top].norm() < 0.1);
    }

    #[test]
    fn identical_rows_degenerate_to_regularized_point() {
        let data = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.0]);
        let fit = fit_vb_gmm(&data, &VbConfig::default()).unwrap();
        assert!(fit.degenerate_data);
        let g = &fit.density;
        assert_eq!(g.n_components(), 1);
        assert_eq!(g.means()[0].as_slice(), &[0.0, 0.0]);
        let cov = &g.covariances()[0];
        assert_eq!(cov[(0, 0)], 1e-6);
        assert_eq!(cov[(1, 1)], 1e-6);
        assert_eq!(cov[(0, 1)], 0.0);
    }

    #[test]
    fn two_blobs_recovered() {
        let a = draw_gaussian(1000, &[-3.0, 0.0], 1.0, 21);
        let b = draw_gaussian(1000, &[3.0, 0.0], 1.0, 22);
        let data = vstack(&a, &b);
        let cfg = VbConfig {
            max_components: 8,
            max_iters: 10_000,
            elbo_tol: 1e-9,
            seed: 1,
            ..VbConfig::default()
        };
        let fit = fit_vb_gmm(&data, &cfg).unwrap();
        let g = &fit.density;

        // oracle: assign draws to the nearest true mean, then use per-cluster
        // sample statistics as the reference parameters.
        let mut stats = [(0usize, [0.0f64; 2]), (0usize, [0.0f64; 2])];
        for i in 0..data.nrows() {
            let x = [data[(i, 0)], data[(i, 1)]];
            let c = usize::from((x[0] + 3.0).abs() > (x[0] - 3.0).abs());
            stats[c].0 += 1;
            stats[c].1[0] += x[0];
            stats[c].1[1] += x[1];
        }
        let oracle: Vec<(f64, [f64; 2])> = stats
            .iter()
            .map(|(n, s)| {
                (
                    *n as f64 / data.nrows() as f64,
                    [s[0] / *n as f64, s[1] / *n as f64],
                )
            })
            .collect();

        let mut order: Vec<usize> = (0..g.n_components()).collect();
        order.sort_by(|&x, &y| g.weights()[y].total_cmp(&g.weights()[x]));
        let dom = &order[..2];
        for &c in dom {
            assert!(
                g.weights()[c] >= 0.4 && g.weights()[c] <= 0.6,
                "weight {}",
                g.weights()[c]
            );
            let m = &g.means()[c];
            let best = oracle
                .iter()
                .map(|(_, om)| ((m[0] - om[0]).powi(2) + (m[1] - om[1]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 0.2, "mean {m} not near any oracle cluster mean");
        }
    }

    #[test]
    fn elbo_is_monotone_within_slack() {
        let a = draw_gaussian(400, &[-2.0, 1.0], 0.8, 31);
        let b = draw_gaussian(600, &[2.0, -1.0], 1.2, 32);
        let fit = fit_vb_gmm(&vstack(&a, &b), &VbConfig::default()).unwrap();
        assert!(fit.elbo_trace.len() >= 2);
        for w in fit.elbo_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-8, "elbo decreased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn fit_is_bitwise_seed_deterministic() {
        let data = draw_gaussian(500, &[1.0, -1.0], 1.5, 41);
        let cfg = VbConfig::default().with_seed(7);
        let f1 = fit_vb_gmm(&data, &cfg).unwrap();
        let f2 = fit_vb_gmm(&data, &cfg).unwrap();
        assert_eq!(f1.density.weights(), f2.density.weights());
        for k in 0..f1.density.n_components() {
            assert_eq!(f1.density.means()[k], f2.density.means()[k]);
            assert_eq!(f1.density.covariances()[k], f2.density.covariances()[k]);
        }
    }

    #[test]
    fn fit_is_invariant_to_row_permutation() {
        let data = draw_gaussian(300, &[0.5, 2.0], 1.0, 51);
        let mut rev = DMatrix::zeros(300, 2);
        for i in 0..300 {
            rev.set_row(i, &data.row(299 - i));
        }
        let cfg = VbConfig::default().with_seed(3);
        let f1 = fit_vb_gmm(&data, &cfg).unwrap();
        let f2 = fit_vb_gmm(&rev, &cfg).unwrap();
        for x in [[0.0, 0.0], [1.0, 3.0], [-2.0, 1.5]] {
            let a = f1.density.log_density(&x).unwrap();
            let b = f2.density.log_density(&x).unwrap();
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn fitted_density_normalizes_on_grid() {
        let a = draw_gaussian(800, &[-2.0, 0.0], 0.7, 61);
        let b = draw_gaussian(1200, &[2.5, 1.0], 1.1, 62);
        let fit = fit_vb_gmm(&vstack(&a, &b), &VbConfig::default()).unwrap();
        let mass = grid_mass(&fit.density, 600);
        assert!((mass - 1.0).abs() < 0.01, "mass {mass}");
    }

    #[test]
    fn weights_sum_to_one_after_pruning() {
        let data = draw_gaussian(100, &[0.0, 0.0], 1.0, 71);
        let fit = fit_vb_gmm(&data, &VbConfig::default()).unwrap();
        let sum: f64 = fit.density.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(fit.density.n_components() <= 10);
    }

    #[test]
    fn rejects_too_few_rows() {
        let data = DMatrix::from_row_slice(1, 2, &[0.0, 0.0]);
        assert!(matches!(
            fit_vb_gmm(&data, &VbConfig::default()),
            Err(Error::EmptyData { min: 2, got: 1 })
        ));
    }

    #[test]
    fn rejects_invalid_config() {
        let data = draw_gaussian(10, &[0.0], 1.0, 1);
        let cfg = VbConfig {
            elbo_tol: 0.0,
            ..VbConfig::default()
        };
        assert!(fit_vb_gmm(&data, &cfg).is_err());
    }
}
