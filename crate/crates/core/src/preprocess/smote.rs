//! Synthetic minority oversampling.
//!
//! Each synthetic row is `x + λ·(neighbor − x)` where `x` is a minority
//! sample, `neighbor` is drawn from its `k` nearest minority neighbors
//! (Euclidean, ties by index) and `λ ~ U[0,1]`.

use ndarray::{Array2, ArrayView1};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
    /// Desired minority/majority ratio after oversampling.
    pub target_ratio: f64,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k_neighbors: 5,
            target_ratio: 1.0,
            seed: 0,
        }
    }
}

/// Where a synthetic row came from (row indices into the input matrix).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticOrigin {
    pub base: usize,
    pub neighbor: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoteOutput {
    /// Original rows in order, followed by synthetic rows.
    pub x: Array2<f64>,
    pub y: Vec<u8>,
    pub origins: Vec<SyntheticOrigin>,
}

fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// Oversample the minority class up to `target_ratio`.
pub fn smote(x: &Array2<f64>, y: &[u8], cfg: &SmoteConfig) -> Result<(Array2<f64>, Vec<u8>)> {
    let out = smote_with_origins(x, y, cfg)?;
    Ok((out.x, out.y))
}

pub fn smote_with_origins(x: &Array2<f64>, y: &[u8], cfg: &SmoteConfig) -> Result<SmoteOutput> {
    if x.nrows() != y.len() {
        return Err(Error::Preprocess(format!(
            "smote: {} rows but {} labels",
            x.nrows(),
            y.len()
        )));
    }
    if cfg.k_neighbors == 0 {
        return Err(Error::Preprocess("smote: k_neighbors must be ≥ 1".into()));
    }
    if !(cfg.target_ratio > 0.0 && cfg.target_ratio <= 1.0) {
        return Err(Error::Preprocess(format!(
            "smote: target_ratio must lie in (0,1], got {}",
            cfg.target_ratio
        )));
    }
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    let n_neg = y.len() - n_pos;
    let minority_class = u8::from(n_pos <= n_neg);
    let minority: Vec<usize> = (0..y.len()).filter(|&i| y[i] == minority_class).collect();
    let n_major = y.len() - minority.len();
    if minority.len() < 2 {
        return Err(Error::Preprocess(format!(
            "smote: minority class has {} samples (need ≥ 2)",
            minority.len()
        )));
    }
    let k = if cfg.k_neighbors >= minority.len() {
        log::warn!(
            "smote: k_neighbors {} clamped to {} (minority size {})",
            cfg.k_neighbors,
            minority.len() - 1,
            minority.len()
        );
        minority.len() - 1
    } else {
        cfg.k_neighbors
    };

    let target = (cfg.target_ratio * n_major as f64 - 1e-9).ceil() as usize;
    let n_new = target.saturating_sub(minority.len());

    // k nearest minority neighbors of each minority sample
    let neighbors: Vec<Vec<usize>> = minority
        .iter()
        .map(|&i| {
            let mut cand: Vec<(f64, usize)> = minority
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (sq_dist(x.row(i), x.row(j)), j))
                .collect();
            cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            cand.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect();

    let mut rng = seeds::rng(seeds::derive(cfg.seed, "smote"));
    let p = x.ncols();
    let mut out = Array2::zeros((x.nrows() + n_new, p));
    out.slice_mut(ndarray::s![..x.nrows(), ..]).assign(x);
    let mut labels = y.to_vec();
    let mut origins = Vec::with_capacity(n_new);
    for g in 0..n_new {
        let m = rng.random_range(0..minority.len());
        let base = minority[m];
        let neighbor = neighbors[m][rng.random_range(0..neighbors[m].len())];
        let lambda: f64 = rng.random();
        for f in 0..p {
            let a = x[[base, f]];
            out[[x.nrows() + g, f]] = a + lambda * (x[[neighbor, f]] - a);
        }
        labels.push(minority_class);
        origins.push(SyntheticOrigin {
            base,
            neighbor,
            lambda,
        });
    }
    Ok(SmoteOutput {
        x: out,
        y: labels,
        origins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn convex_combination() {
        // x=[0,0], neighbor=[2,2], λ=0.5 → [1,1]
        let base = array![0.0, 0.0];
        let nb = array![2.0, 2.0];
        let lambda = 0.5;
        let s = &base + &((&nb - &base) * lambda);
        assert_eq!(s, array![1.0, 1.0]);
    }

    #[test]
    fn duplicate_neighbor_reproduces_sample() {
        let x = array![[1.0, 1.0], [1.0, 1.0], [5.0, 5.0], [6.0, 5.0], [7.0, 5.0], [8.0, 5.0]];
        let y = [1, 1, 0, 0, 0, 0];
        let cfg = SmoteConfig {
            k_neighbors: 1,
            ..SmoteConfig::default()
        };
        let (xs, ys) = smote(&x, &y, &cfg).unwrap();
        assert_eq!(ys.len(), 8);
        for r in 6..8 {
            assert_eq!(xs.row(r), x.row(0));
        }
    }

    #[test]
    fn ten_to_ninety() {
        let n = 100;
        let x = Array2::from_shape_fn((n, 2), |(i, j)| ((i * 7 + j * 3) % 17) as f64);
        let y: Vec<u8> = (0..n).map(|i| u8::from(i < 10)).collect();
        let (xs, ys) = smote(&x, &y, &SmoteConfig::default()).unwrap();
        assert_eq!(ys.iter().filter(|&&v| v == 1).count(), 90);
        assert_eq!(xs.nrows(), 180);
        assert_eq!(xs.slice(ndarray::s![..n, ..]), x);
        assert_eq!(&ys[..n], &y[..]);
    }

    #[test]
    fn partial_ratio_and_errors() {
        let x = Array2::from_shape_fn((40, 1), |(i, _)| i as f64);
        let y: Vec<u8> = (0..40).map(|i| u8::from(i < 4)).collect();
        let cfg = SmoteConfig {
            target_ratio: 0.5,
            ..SmoteConfig::default()
        };
        let (_, ys) = smote(&x, &y, &cfg).unwrap();
        assert_eq!(ys.iter().filter(|&&v| v == 1).count(), 18);

        let mut lone = vec![0u8; 40];
        lone[0] = 1;
        assert!(smote(&x, &lone, &SmoteConfig::default()).is_err());
    }
}
