//! k-neighbor edge construction and Gaussian-kernel weighting.

use std::fmt;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::WeightedGraph;
use crate::error::{Error, Result};

/// Kernel scale: a fixed positive value, or the median over nodes of the
/// squared distance to their k-th neighbor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Auto,
    Fixed(f64),
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Auto => f.write_str("auto"),
            Alpha::Fixed(a) => write!(f, "{a}"),
        }
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Alpha::Auto => s.serialize_str("auto"),
            Alpha::Fixed(a) => s.serialize_f64(*a),
        }
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(a) => Ok(Alpha::Fixed(a)),
            Repr::Str(s) if s == "auto" => Ok(Alpha::Auto),
            Repr::Str(s) => Err(serde::de::Error::custom(format!(
                "alpha must be a number or \"auto\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub k: usize,
    pub alpha: Alpha,
}

impl KernelConfig {
    pub fn new(k: usize) -> Self {
        KernelConfig { k, alpha: Alpha::Auto }
    }
}

/// Symmetric k-neighbor edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSet {
    pub n: usize,
    pub k: usize,
    /// Unordered pairs `(i, j)` with `i < j`, sorted.
    pub pairs: Vec<(usize, usize)>,
    /// Squared distance from each node to its k-th nearest neighbor.
    pub kth_sq_dist: Vec<f64>,
}

fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// Connect `i` and `j` when either is among the other's `k` nearest
/// neighbors (Euclidean; ties broken by smaller node index).
pub fn knn_edges(x: &Array2<f64>, k: usize) -> Result<EdgeSet> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::Graph(format!("knn_edges: need ≥ 2 nodes, got {n}")));
    }
    if k == 0 || k >= n {
        return Err(Error::Graph(format!("knn_edges: k = {k} must satisfy 1 ≤ k < n = {n}")));
    }
    let mut is_edge = vec![false; n * n];
    let mut kth_sq_dist = vec![0.0; n];
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        cand.clear();
        cand.extend(
            (0..n)
                .filter(|&j| j != i)
                .map(|j| (sq_dist(x.row(i), x.row(j)), j)),
        );
        let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        cand.select_nth_unstable_by(k - 1, order);
        kth_sq_dist[i] = cand[k - 1].0;
        for &(_, j) in &cand[..k] {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            is_edge[a * n + b] = true;
        }
    }
    let pairs = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| is_edge[i * n + j])
        .collect();
    Ok(EdgeSet {
        n,
        k,
        pairs,
        kth_sq_dist,
    })
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Resolve the kernel scale for an edge set.
pub fn resolve_alpha(edges: &EdgeSet, alpha: Alpha) -> Result<f64> {
    match alpha {
        Alpha::Fixed(a) if a > 0.0 && a.is_finite() => Ok(a),
        Alpha::Fixed(a) => Err(Error::Graph(format!("alpha must be > 0, got {a}"))),
        Alpha::Auto => {
            let a = median(&edges.kth_sq_dist);
            if a > 0.0 {
                Ok(a)
            } else {
                log::warn!("simgraph: median k-th neighbor distance is 0, using alpha = 1");
                Ok(1.0)
            }
        }
    }
}

/// Weight each edge by `exp(−‖x_i − x_j‖² / α)`.
pub fn gaussian_weights(
    node_ids: Vec<String>,
    x: &Array2<f64>,
    edges: &EdgeSet,
    alpha: Alpha,
) -> Result<WeightedGraph> {
    if node_ids.len() != x.nrows() || edges.n != x.nrows() {
        return Err(Error::Graph(format!(
            "gaussian_weights: {} ids, {} rows, edge set over {} nodes",
            node_ids.len(),
            x.nrows(),
            edges.n
        )));
    }
    let a = resolve_alpha(edges, alpha)?;
    let weighted = edges.pairs.iter().map(|&(i, j)| {
        let w = (-sq_dist(x.row(i), x.row(j)) / a).exp();
        // far pairs underflow; keep them as (tiny) edges
        (i, j, w.max(f64::MIN_POSITIVE))
    });
    WeightedGraph::from_edges(node_ids, weighted)
}

/// k-neighbor Gaussian graph, clamping `k` to `n − 1` when the node set is
/// too small.
pub fn knn_graph(node_ids: Vec<String>, x: &Array2<f64>, cfg: &KernelConfig) -> Result<WeightedGraph> {
    let n = x.nrows();
    let mut k = cfg.k;
    if k >= n && n >= 2 {
        log::info!("simgraph: k = {} clamped to {} for {} nodes", k, n - 1, n);
        k = n - 1;
    }
    let edges = knn_edges(x, k)?;
    gaussian_weights(node_ids, x, &edges, cfg.alpha)
}
