//! Reference classifiers on concatenated per-day features.

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;

/// L2-penalized logistic regression; the bias is not penalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Array1<f64>,
    pub bias: f64,
    pub l2_lambda: f64,
    /// Gradient norm of the penalized objective at the returned parameters.
    pub grad_norm: f64,
    pub iterations: usize,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

struct Objective<'a> {
    x: &'a Array2<f64>,
    y: &'a [u8],
    lambda: f64,
}

impl Objective<'_> {
    /// Mean log-likelihood minus `λ/2·‖w‖²`. `theta = [w ; b]`.
    fn value(&self, theta: &[f64]) -> f64 {
        let d = self.x.ncols();
        let n = self.x.nrows() as f64;
        let ll: f64 = self
            .x
            .rows()
            .into_iter()
            .zip(self.y)
            .map(|(row, &yi)| {
                let z = linear(row, &theta[..d], theta[d]);
                f64::from(yi) * z - log1p_exp(z)
            })
            .sum();
        ll / n - 0.5 * self.lambda * theta[..d].iter().map(|w| w * w).sum::<f64>()
    }

    /// Gradient and negated Hessian (row-major) of [`Self::value`].
    fn derivatives(&self, theta: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d = self.x.ncols();
        let q = d + 1;
        let n = self.x.nrows() as f64;
        let mut grad = vec![0.0; q];
        let mut neg_hess = vec![0.0; q * q];
        let mut xi = vec![1.0; q];
        for (row, &yi) in self.x.rows().into_iter().zip(self.y) {
            xi[..d].iter_mut().zip(row.iter()).for_each(|(a, b)| *a = *b);
            let p = sigmoid(linear(row, &theta[..d], theta[d]));
            let r = f64::from(yi) - p;
            let s = p * (1.0 - p);
            for a in 0..q {
                grad[a] += r * xi[a] / n;
                for b in 0..=a {
                    neg_hess[a * q + b] += s * xi[a] * xi[b] / n;
                }
            }
        }
        for a in 0..q {
            for b in 0..a {
                neg_hess[b * q + a] = neg_hess[a * q + b];
            }
        }
        for a in 0..d {
            grad[a] -= self.lambda * theta[a];
            neg_hess[a * q + a] += self.lambda;
        }
        (grad, neg_hess)
    }
}

fn linear(row: ArrayView1<f64>, w: &[f64], b: f64) -> f64 {
    row.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() + b
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Fit from zero initialization.
pub fn logistic_fit(
    x: &Array2<f64>,
    y: &[u8],
    l2_lambda: f64,
    max_iters: usize,
    tol: f64,
) -> Result<LogisticModel> {
    let init = vec![0.0; x.ncols() + 1];
    logistic_fit_from(x, y, l2_lambda, max_iters, tol, &init)
}

/// Maximize the penalized log-likelihood by damped Newton ascent from
/// `init = [w ; b]` until the gradient norm is at most `tol`.
pub fn logistic_fit_from(
    x: &Array2<f64>,
    y: &[u8],
    l2_lambda: f64,
    max_iters: usize,
    tol: f64,
    init: &[f64],
) -> Result<LogisticModel> {
    if x.nrows() != y.len() {
        return Err(Error::Baseline(format!("{} rows but {} labels", x.nrows(), y.len())));
    }
    if init.len() != x.ncols() + 1 {
        return Err(Error::Baseline("initial parameters have the wrong length".into()));
    }
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    if n_pos == 0 || n_pos == y.len() {
        return Err(Error::Baseline("logistic regression needs both classes".into()));
    }
    if !(l2_lambda >= 0.0) {
        return Err(Error::Baseline("l2_lambda must be ≥ 0".into()));
    }
    let obj = Objective {
        x,
        y,
        lambda: l2_lambda,
    };
    let q = x.ncols() + 1;
    let mut theta = init.to_vec();
    let mut value = obj.value(&theta);
    let mut iterations = 0;
    let (mut grad, mut neg_hess) = obj.derivatives(&theta);
    while norm(&grad) > tol && iterations < max_iters {
        iterations += 1;
        // tiny ridge keeps the bias block invertible on separable data
        for a in 0..q {
            neg_hess[a * q + a] += 1e-12;
        }
        let step = cholesky_solve(&neg_hess, &grad, q).unwrap_or_else(|| grad.clone());
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = theta.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let v = obj.value(&cand);
            if v >= value || t < 1e-12 {
                theta = cand;
                value = v;
                break;
            }
            t *= 0.5;
        }
        (grad, neg_hess) = obj.derivatives(&theta);
    }
    let d = x.ncols();
    Ok(LogisticModel {
        weights: Array1::from(theta[..d].to_vec()),
        bias: theta[d],
        l2_lambda,
        grad_norm: norm(&grad),
        iterations,
    })
}

/// `sigmoid(w·x + b)` per row.
pub fn logistic_predict(model: &LogisticModel, x: &Array2<f64>) -> Result<Vec<f64>> {
    if x.ncols() != model.weights.len() {
        return Err(Error::Baseline(format!(
            "feature dimension {} does not match model {}",
            x.ncols(),
            model.weights.len()
        )));
    }
    let w = model.weights.as_slice().expect("contiguous weights");
    Ok(x.rows()
        .into_iter()
        .map(|row| sigmoid(linear(row, w, model.bias)))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub x: Array2<f64>,
    pub y: Vec<u8>,
    pub k: usize,
}

impl KnnModel {
    pub fn new(x: Array2<f64>, y: Vec<u8>, k: usize) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::Baseline("empty training set".into()));
        }
        if x.nrows() != y.len() {
            return Err(Error::Baseline(format!("{} rows but {} labels", x.nrows(), y.len())));
        }
        if k == 0 || k > x.nrows() {
            return Err(Error::Baseline(format!(
                "k = {k} must satisfy 1 ≤ k ≤ {} training rows",
                x.nrows()
            )));
        }
        Ok(KnnModel { x, y, k })
    }
}

/// Fraction of positives among the `k` nearest training rows (Euclidean;
/// distance ties broken by training-row index).
pub fn knn_predict(model: &KnnModel, x: &Array2<f64>) -> Result<Vec<f64>> {
    if x.ncols() != model.x.ncols() {
        return Err(Error::Baseline(format!(
            "feature dimension {} does not match training data {}",
            x.ncols(),
            model.x.ncols()
        )));
    }
    let k = model.k;
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(model.x.nrows());
    Ok(x.rows()
        .into_iter()
        .map(|q| {
            cand.clear();
            cand.extend(model.x.rows().into_iter().enumerate().map(|(i, r)| {
                let d: f64 = r.iter().zip(q.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                (d, i)
            }));
            let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < cand.len() {
                cand.select_nth_unstable_by(k - 1, order);
            }
            let pos = cand[..k].iter().filter(|&&(_, i)| model.y[i] == 1).count();
            pos as f64 / k as f64
        })
        .collect())
}
