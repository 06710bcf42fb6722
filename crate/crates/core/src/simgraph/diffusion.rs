//! Transition matrices and truncated diffusion aggregation.
//!
//! For daily transition matrices `M(1) … M(T)` the diffusion graph is
//!
//! ```text
//! A = Σ_{t=1..T} M(1)·M(2)···M(t)
//! ```
//!
//! which reduces to `Σ_{t=1..T} Mᵗ` when every day has the same matrix.

use ndarray::Array2;

use super::{Adjacency, WeightedGraph};
use crate::error::{Error, Result};

/// Row-stochastic `D⁻¹W`, stored as sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    node_ids: Vec<String>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl TransitionMatrix {
    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn n(&self) -> usize {
        self.node_ids.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|&(_, w)| w).sum()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.n();
        let mut m = Array2::zeros((n, n));
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                m[[i, j]] += w;
            }
        }
        m
    }
}

/// Row-normalize a weighted graph. Isolated nodes get a unit self-loop.
pub fn transition(w: &WeightedGraph) -> Result<TransitionMatrix> {
    if w.n_nodes() == 0 {
        return Err(Error::Graph("transition: empty graph".into()));
    }
    let rows = (0..w.n_nodes())
        .map(|i| {
            let d = w.degree_weight(i);
            if d > 0.0 {
                w.neighbors(i).iter().map(|&(j, x)| (j, x / d)).collect()
            } else {
                vec![(i, 1.0)]
            }
        })
        .collect();
    Ok(TransitionMatrix {
        node_ids: w.node_ids().to_vec(),
        rows,
    })
}

/// Directed weighted adjacency produced by truncated diffusion.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionGraph {
    pub node_ids: Vec<String>,
    pub matrix: Array2<f64>,
    pub horizon: usize,
}

impl Adjacency for DiffusionGraph {
    fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    fn out_edges(&self, i: usize) -> Vec<(usize, f64)> {
        self.matrix
            .row(i)
            .iter()
            .enumerate()
            .filter(|&(j, &w)| j != i && w > 0.0)
            .map(|(j, &w)| (j, w))
            .collect()
    }

    fn is_directed(&self) -> bool {
        true
    }
}

/// `A = Σ_t Π_{s≤t} M(s)` over the ordered daily transition matrices.
pub fn diffusion_aggregate(transitions: &[TransitionMatrix]) -> Result<DiffusionGraph> {
    let first = transitions
        .first()
        .ok_or_else(|| Error::Graph("diffusion_aggregate: no transition matrices".into()))?;
    let n = first.n();
    for (t, m) in transitions.iter().enumerate() {
        if m.n() != n || m.node_ids != first.node_ids {
            return Err(Error::Graph(format!(
                "diffusion_aggregate: day {} matrix is {}×{}, expected {n}×{n} on the same nodes",
                t + 1,
                m.n(),
                m.n()
            )));
        }
    }
    let mut product = first.to_dense();
    let mut acc = product.clone();
    let mut next = Array2::zeros((n, n));
    for m in &transitions[1..] {
        next.fill(0.0);
        for i in 0..n {
            for k in 0..n {
                let p = product[[i, k]];
                if p == 0.0 {
                    continue;
                }
                for &(j, w) in m.row(k) {
                    next[[i, j]] += p * w;
                }
            }
        }
        std::mem::swap(&mut product, &mut next);
        acc += &product;
    }
    Ok(DiffusionGraph {
        node_ids: first.node_ids.clone(),
        matrix: acc,
        horizon: transitions.len(),
    })
}
