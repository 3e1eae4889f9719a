//! Gaussian-process regression with a Matérn-5/2 ARD kernel.
//!
//! Targets are standardized before fitting. Hyperparameters are fitted by
//! projected gradient ascent on the log marginal likelihood in log space,
//! restarted from several points.

use super::{MoboError, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::rng::{self, Stream};
use rand::Rng;

pub const LENGTHSCALE_BOUNDS: (f64, f64) = (0.01, 10.0);
pub const SIGNAL_VAR_BOUNDS: (f64, f64) = (0.05, 20.0);
pub const NOISE_VAR_BOUNDS: (f64, f64) = (1e-6, 1.0);
pub const JITTER_START: f64 = 1e-10;
pub const JITTER_MAX: f64 = 1e-4;

const SQRT5: f64 = 2.236_067_977_499_79;

#[derive(Debug, Clone, PartialEq)]
pub struct GpHyper {
    pub lengthscales: Vec<f64>,
    pub signal_var: f64,
    pub noise_var: f64,
}

impl GpHyper {
    fn to_log(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.lengthscales.iter().map(|l| l.ln()).collect();
        v.push(self.signal_var.ln());
        v.push(self.noise_var.ln());
        v
    }

    fn from_log(theta: &[f64]) -> Self {
        let d = theta.len() - 2;
        Self {
            lengthscales: theta[..d].iter().map(|t| t.exp()).collect(),
            signal_var: theta[d].exp(),
            noise_var: theta[d + 1].exp(),
        }
    }

    fn log_bounds(dim: usize) -> Vec<(f64, f64)> {
        let lb = |(lo, hi): (f64, f64)| (f64::ln(lo), f64::ln(hi));
        let mut b = vec![lb(LENGTHSCALE_BOUNDS); dim];
        b.push(lb(SIGNAL_VAR_BOUNDS));
        b.push(lb(NOISE_VAR_BOUNDS));
        b
    }
}

/// Matérn-5/2 covariance with per-dimension lengthscales.
pub fn matern52(a: &[f64], b: &[f64], hyper: &GpHyper) -> f64 {
    let r2: f64 = a
        .iter()
        .zip(b)
        .zip(&hyper.lengthscales)
        .map(|((x, y), l)| ((x - y) / l).powi(2))
        .sum();
    let r = r2.sqrt();
    hyper.signal_var * (1.0 + SQRT5 * r + 5.0 / 3.0 * r2) * (-SQRT5 * r).exp()
}

fn kernel_matrix(x: &[Vec<f64>], hyper: &GpHyper) -> Matrix {
    let n = x.len();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = matern52(&x[i], &x[j], hyper) + if i == j { hyper.noise_var } else { 0.0 };
            k.set(i, j, v);
            k.set(j, i, v);
        }
    }
    k
}

/// Log marginal likelihood of standardized targets and its gradient with
/// respect to the log hyperparameters `[ln l_1.., ln s2, ln noise]`.
fn lml_and_grad(x: &[Vec<f64>], y: &[f64], theta: &[f64]) -> Option<(f64, Vec<f64>)> {
    let hyper = GpHyper::from_log(theta);
    let n = x.len();
    let d = hyper.lengthscales.len();
    let k = kernel_matrix(x, &hyper);
    let (chol, _) = Cholesky::factor_with_jitter(&k, JITTER_START, JITTER_MAX)?;
    let alpha = chol.solve(y);
    let lml = -0.5 * y.iter().zip(&alpha).map(|(a, b)| a * b).sum::<f64>()
        - 0.5 * chol.log_det()
        - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
    // W = alpha alpha^T - K^{-1}; dL/dtheta = 0.5 * sum_ij W_ij dK_ij
    let kinv = chol.inverse();
    let mut grad = vec![0.0; d + 2];
    let mut sq = vec![0.0; d];
    for i in 0..n {
        for j in 0..=i {
            let w = alpha[i] * alpha[j] - kinv.get(i, j);
            let mult = if i == j { 0.5 } else { 1.0 };
            for k in 0..d {
                let t = (x[i][k] - x[j][k]) / hyper.lengthscales[k];
                sq[k] = t * t;
            }
            let r2: f64 = sq.iter().sum();
            let r = r2.sqrt();
            let e = (-SQRT5 * r).exp();
            let kij = hyper.signal_var * (1.0 + SQRT5 * r + 5.0 / 3.0 * r2) * e;
            // d k / d ln l_k = s2 * 5/3 * (1 + sqrt5 r) e^{-sqrt5 r} * (dx_k / l_k)^2
            let common = hyper.signal_var * 5.0 / 3.0 * (1.0 + SQRT5 * r) * e;
            for k in 0..d {
                grad[k] += mult * w * common * sq[k];
            }
            grad[d] += mult * w * kij;
            if i == j {
                grad[d + 1] += mult * w * hyper.noise_var;
            }
        }
    }
    Some((lml, grad))
}

/// Log marginal likelihood of raw targets under `hyper` (targets are
/// standardized the same way [`Gp::fit`] does).
pub fn log_marginal_likelihood(x: &[Vec<f64>], y: &[f64], hyper: &GpHyper) -> f64 {
    let (_, _, ys) = standardize(y);
    lml_and_grad(x, &ys, &hyper.to_log()).map_or(f64::NEG_INFINITY, |(l, _)| l)
}

fn standardize(y: &[f64]) -> (f64, f64, Vec<f64>) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = if var > 1e-24 { var.sqrt() } else { 1.0 };
    (mean, std, y.iter().map(|v| (v - mean) / std).collect())
}

#[derive(Debug, Clone)]
pub struct GpFitOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub step: f64,
    pub seed: u64,
}

impl Default for GpFitOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            iterations: 80,
            step: 0.1,
            seed: 0,
        }
    }
}

/// Projected Adam ascent from `theta`; returns the best point visited.
fn ascend(
    x: &[Vec<f64>],
    y: &[f64],
    mut theta: Vec<f64>,
    bounds: &[(f64, f64)],
    opts: &GpFitOptions,
) -> Option<(f64, Vec<f64>)> {
    let p = theta.len();
    let (mut m, mut v) = (vec![0.0; p], vec![0.0; p]);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for t in 1..=opts.iterations {
        let Some((lml, grad)) = lml_and_grad(x, y, &theta) else {
            break;
        };
        if best.as_ref().is_none_or(|(b, _)| lml > *b) {
            best = Some((lml, theta.clone()));
        }
        let c1 = 1.0 - 0.9f64.powi(t as i32);
        let c2 = 1.0 - 0.999f64.powi(t as i32);
        for k in 0..p {
            m[k] = 0.9 * m[k] + 0.1 * grad[k];
            v[k] = 0.999 * v[k] + 0.001 * grad[k] * grad[k];
            theta[k] += opts.step * (m[k] / c1) / ((v[k] / c2).sqrt() + 1e-8);
            theta[k] = theta[k].clamp(bounds[k].0, bounds[k].1);
        }
    }
    if let Some((lml, _)) = lml_and_grad(x, y, &theta) {
        if best.as_ref().is_none_or(|(b, _)| lml > *b) {
            best = Some((lml, theta));
        }
    }
    best
}

/// Fitted GP over unit-cube inputs.
#[derive(Debug, Clone)]
pub struct Gp {
    x: Vec<Vec<f64>>,
    y_mean: f64,
    y_std: f64,
    hyper: GpHyper,
    chol: Cholesky,
    alpha: Vec<f64>,
    ys: Vec<f64>,
}

impl Gp {
    pub fn fit(x: &[Vec<f64>], y: &[f64], opts: &GpFitOptions) -> Result<Self> {
        if x.len() < 2 || x.len() != y.len() {
            return Err(MoboError::Surrogate(format!(
                "need at least 2 matching points, got {} / {}",
                x.len(),
                y.len()
            )));
        }
        let dim = x[0].len();
        if x.iter().any(|r| r.len() != dim) || y.iter().any(|v| !v.is_finite()) {
            return Err(MoboError::Surrogate(
                "ragged or non-finite training data".into(),
            ));
        }
        let (y_mean, y_std, ys) = standardize(y);
        let bounds = GpHyper::log_bounds(dim);
        let degenerate = x.iter().all(|r| r == &x[0]);
        let hyper = if degenerate {
            // identical inputs carry no spatial information: explain the data as noise
            GpHyper {
                lengthscales: vec![LENGTHSCALE_BOUNDS.1; dim],
                signal_var: SIGNAL_VAR_BOUNDS.0,
                noise_var: NOISE_VAR_BOUNDS.1,
            }
        } else {
            let mut rng = rng::stream(opts.seed, Stream::Search);
            let mut best: Option<(f64, Vec<f64>)> = None;
            for r in 0..opts.restarts.max(1) {
                let start: Vec<f64> = if r == 0 {
                    GpHyper {
                        lengthscales: vec![0.5; dim],
                        signal_var: 1.0,
                        noise_var: 1e-2,
                    }
                    .to_log()
                } else {
                    bounds
                        .iter()
                        .map(|&(lo, hi)| rng.random_range(lo..hi))
                        .collect()
                };
                if let Some((lml, theta)) = ascend(x, &ys, start, &bounds, opts) {
                    if best.as_ref().is_none_or(|(b, _)| lml > *b) {
                        best = Some((lml, theta));
                    }
                }
            }
            let (_, theta) =
                best.ok_or_else(|| MoboError::Surrogate("kernel matrix never factorized".into()))?;
            GpHyper::from_log(&theta)
        };
        Self::with_hyper(x, y_mean, y_std, &ys, hyper)
    }

    /// GP with fixed hyperparameters on raw targets.
    pub fn with_hyperparameters(x: &[Vec<f64>], y: &[f64], hyper: GpHyper) -> Result<Self> {
        let (m, s, ys) = standardize(y);
        Self::with_hyper(x, m, s, &ys, hyper)
    }

    fn with_hyper(
        x: &[Vec<f64>],
        y_mean: f64,
        y_std: f64,
        ys: &[f64],
        hyper: GpHyper,
    ) -> Result<Self> {
        let k = kernel_matrix(x, &hyper);
        let (chol, _) = Cholesky::factor_with_jitter(&k, JITTER_START, JITTER_MAX)
            .ok_or_else(|| MoboError::Surrogate("kernel matrix is not positive definite".into()))?;
        let alpha = chol.solve(ys);
        Ok(Self {
            x: x.to_vec(),
            y_mean,
            y_std,
            hyper,
            chol,
            alpha,
            ys: ys.to_vec(),
        })
    }

    pub fn hyper(&self) -> &GpHyper {
        &self.hyper
    }

    /// Latent mean and variance at `x` in target units; variance is clamped at 0.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        let kstar: Vec<f64> = self
            .x
            .iter()
            .map(|xi| matern52(xi, x, &self.hyper))
            .collect();
        let mean: f64 = kstar.iter().zip(&self.alpha).map(|(a, b)| a * b).sum();
        let v = self.chol.solve_lower(&kstar);
        let var = self.hyper.signal_var - v.iter().map(|t| t * t).sum::<f64>();
        debug_assert!(var >= -1e-9, "posterior variance {var}");
        (
            self.y_mean + self.y_std * mean,
            self.y_std * self.y_std * var.max(0.0),
        )
    }

    /// Log marginal likelihood of the training data (standardized targets).
    pub fn log_marginal_likelihood(&self) -> f64 {
        let quad: f64 = self.ys.iter().zip(&self.alpha).map(|(a, b)| a * b).sum();
        -0.5 * quad
            - 0.5 * self.chol.log_det()
            - 0.5 * self.ys.len() as f64 * (2.0 * std::f64::consts::PI).ln()
    }
}
