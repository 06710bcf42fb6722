//! Multivariate imputation by chained equations with ridge-regularized
//! linear regressions.
//!
//! Missing entries are marked with `NaN`. Each sweep visits every column that
//! has missing entries, regresses it on the currently filled predictor
//! columns over the rows where it is observed, and replaces its missing
//! entries with the predictions.

use ndarray::Array2;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;
use crate::seeds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImputeConfig {
    pub n_iterations: usize,
    pub ridge_lambda: f64,
    /// Drives the column visiting order within each sweep.
    pub seed: u64,
}

impl Default for ImputeConfig {
    fn default() -> Self {
        ImputeConfig {
            n_iterations: 10,
            ridge_lambda: 1e-3,
            seed: 0,
        }
    }
}

/// Imputed matrix plus the per-column, per-sweep diagnostics log.
#[derive(Debug, Clone, PartialEq)]
pub struct Imputation {
    pub matrix: Array2<f64>,
    /// One line per imputed column per sweep.
    pub diagnostics: Vec<String>,
}

/// Impute using every other column as a predictor.
pub fn mice_impute(matrix: &Array2<f64>, cfg: &ImputeConfig) -> Result<Imputation> {
    impute(matrix, cfg, |_target, _pred| true)
}

/// Impute a day-major temporal stack with `features_per_day` columns per
/// day. Columns of day `t` are regressed only on columns of days `≤ t`.
pub fn mice_impute_temporal(
    matrix: &Array2<f64>,
    features_per_day: usize,
    cfg: &ImputeConfig,
) -> Result<Imputation> {
    if features_per_day == 0 || matrix.ncols() % features_per_day != 0 {
        return Err(Error::Preprocess(format!(
            "{} columns is not a multiple of {} features per day",
            matrix.ncols(),
            features_per_day
        )));
    }
    impute(matrix, cfg, |target, pred| {
        pred / features_per_day <= target / features_per_day
    })
}

fn impute(
    matrix: &Array2<f64>,
    cfg: &ImputeConfig,
    allowed: impl Fn(usize, usize) -> bool,
) -> Result<Imputation> {
    if cfg.n_iterations == 0 {
        return Err(Error::Preprocess("n_iterations must be ≥ 1".into()));
    }
    if !(cfg.ridge_lambda >= 0.0) {
        return Err(Error::Preprocess("ridge_lambda must be ≥ 0".into()));
    }
    let (n, p) = matrix.dim();
    let missing = matrix.mapv(|v| v.is_nan());

    for j in 0..p {
        let observed = (0..n).filter(|&i| !missing[[i, j]]).count();
        if observed < 2 {
            return Err(Error::Preprocess(format!(
                "column {j} has {observed} observed values (need ≥ 2)"
            )));
        }
    }
    if let Some(i) = (0..n).find(|&i| (0..p).all(|j| missing[[i, j]])) {
        return Err(Error::Preprocess(format!("row {i} has no observed values")));
    }
    if matrix.iter().any(|v| v.is_infinite()) {
        return Err(Error::Preprocess("matrix contains infinite values".into()));
    }

    let mut filled = matrix.clone();
    let mut targets = Vec::new();
    for j in 0..p {
        let obs: Vec<f64> = (0..n).filter(|&i| !missing[[i, j]]).map(|i| matrix[[i, j]]).collect();
        if obs.len() == n {
            continue;
        }
        let mean = obs.iter().sum::<f64>() / obs.len() as f64;
        for i in 0..n {
            if missing[[i, j]] {
                filled[[i, j]] = mean;
            }
        }
        targets.push(j);
    }

    let mut diagnostics = Vec::new();
    if targets.is_empty() {
        return Ok(Imputation {
            matrix: filled,
            diagnostics,
        });
    }

    let mut rng = seeds::rng(seeds::derive(cfg.seed, "mice"));
    for iter in 1..=cfg.n_iterations {
        let mut order = targets.clone();
        order.shuffle(&mut rng);
        for &j in &order {
            let preds: Vec<usize> = (0..p).filter(|&k| k != j && allowed(j, k)).collect();
            let rows: Vec<usize> = (0..n).filter(|&i| !missing[[i, j]]).collect();
            let fit = fit_ridge(&filled, &rows, &preds, j, cfg.ridge_lambda);
            let line = match fit {
                Some(model) => {
                    for i in 0..n {
                        if missing[[i, j]] {
                            filled[[i, j]] = model.predict(&filled, i, &preds);
                        }
                    }
                    let rss: f64 = rows
                        .iter()
                        .map(|&i| (filled[[i, j]] - model.predict(&filled, i, &preds)).powi(2))
                        .sum();
                    format!("iter={iter} column={j} residual_norm={:.6e}", rss.sqrt())
                }
                None => {
                    let mean = rows.iter().map(|&i| filled[[i, j]]).sum::<f64>() / rows.len() as f64;
                    for i in 0..n {
                        if missing[[i, j]] {
                            filled[[i, j]] = mean;
                        }
                    }
                    let rss: f64 = rows.iter().map(|&i| (filled[[i, j]] - mean).powi(2)).sum();
                    log::debug!("mice: column {j} degenerate regression, using column mean");
                    format!(
                        "iter={iter} column={j} residual_norm={:.6e} fallback=mean",
                        rss.sqrt()
                    )
                }
            };
            diagnostics.push(line);
        }
    }
    Ok(Imputation {
        matrix: filled,
        diagnostics,
    })
}

struct RidgeModel {
    x_mean: Vec<f64>,
    y_mean: f64,
    beta: Vec<f64>,
}

impl RidgeModel {
    fn predict(&self, m: &Array2<f64>, row: usize, preds: &[usize]) -> f64 {
        self.y_mean
            + preds
                .iter()
                .zip(&self.x_mean)
                .zip(&self.beta)
                .map(|((&k, mu), b)| (m[[row, k]] - mu) * b)
                .sum::<f64>()
    }
}

/// Centered ridge regression of column `target` on `preds` over `rows`; the
/// intercept is not penalized. `None` when the normal equations are singular
/// or there are no predictors.
fn fit_ridge(
    m: &Array2<f64>,
    rows: &[usize],
    preds: &[usize],
    target: usize,
    lambda: f64,
) -> Option<RidgeModel> {
    let q = preds.len();
    if q == 0 || rows.is_empty() {
        return None;
    }
    let nr = rows.len() as f64;
    let x_mean: Vec<f64> = preds
        .iter()
        .map(|&k| rows.iter().map(|&i| m[[i, k]]).sum::<f64>() / nr)
        .collect();
    let y_mean = rows.iter().map(|&i| m[[i, target]]).sum::<f64>() / nr;

    let mut gram = vec![0.0; q * q];
    let mut rhs = vec![0.0; q];
    let mut xc = vec![0.0; q];
    for &i in rows {
        for (a, &k) in preds.iter().enumerate() {
            xc[a] = m[[i, k]] - x_mean[a];
        }
        let yc = m[[i, target]] - y_mean;
        for a in 0..q {
            rhs[a] += xc[a] * yc;
            for b in 0..=a {
                gram[a * q + b] += xc[a] * xc[b];
            }
        }
    }
    for a in 0..q {
        for b in 0..a {
            gram[b * q + a] = gram[a * q + b];
        }
        gram[a * q + a] += lambda;
    }
    let beta = cholesky_solve(&gram, &rhs, q)?;
    Some(RidgeModel {
        x_mean,
        y_mean,
        beta,
    })
}
