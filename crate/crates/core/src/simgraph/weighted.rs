use super::Adjacency;
use crate::error::{Error, Result};

/// Undirected weighted graph with weights in `(0, 1]` and no self-edges.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    node_ids: Vec<String>,
    /// Sorted by neighbor index; symmetric.
    adj: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    /// Build from undirected `(i, j, w)` triples. Each unordered pair may be
    /// given at most once.
    pub fn from_edges(
        node_ids: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let n = node_ids.len();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::Graph(format!("edge ({i},{j}) out of range for {n} nodes")));
            }
            if i == j {
                return Err(Error::Graph(format!("self-edge on node {i}")));
            }
            if !(w > 0.0 && w <= 1.0) {
                return Err(Error::Graph(format!("edge ({i},{j}) weight {w} outside (0,1]")));
            }
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        for (i, row) in adj.iter_mut().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Graph(format!("duplicate edge at node {i}")));
            }
        }
        Ok(WeightedGraph { node_ids, adj })
    }

    pub fn n_nodes(&self) -> usize {
        self.node_ids.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adj[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map_or(0.0, |pos| self.adj[i][pos].1)
    }

    /// Undirected edges as `(i, j, w)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .filter(move |&&(j, _)| j > i)
                .map(move |&(j, w)| (i, j, w))
        })
    }

    pub fn degree_weight(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|&(_, w)| w).sum()
    }
}

impl Adjacency for WeightedGraph {
    fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    fn out_edges(&self, i: usize) -> Vec<(usize, f64)> {
        self.adj[i].clone()
    }

    fn is_directed(&self) -> bool {
        false
    }
}

/// Average daily graphs edge by edge; days on which an edge is absent count
/// as weight 0.
pub fn aggregate_mean(graphs: &[WeightedGraph]) -> Result<WeightedGraph> {
    let first = graphs
        .first()
        .ok_or_else(|| Error::Graph("aggregate_mean: no graphs".into()))?;
    if let Some(g) = graphs.iter().find(|g| g.node_ids != first.node_ids) {
        return Err(Error::Graph(format!(
            "aggregate_mean: node-set mismatch ({} vs {} nodes)",
            first.n_nodes(),
            g.n_nodes()
        )));
    }
    let t = graphs.len() as f64;
    let n = first.n_nodes();
    let mut edges = Vec::new();
    let mut acc: Vec<f64> = vec![0.0; n];
    for i in 0..n {
        let mut touched = Vec::new();
        for g in graphs {
            for &(j, w) in g.neighbors(i) {
                if j > i {
                    if acc[j] == 0.0 {
                        touched.push(j);
                    }
                    acc[j] += w;
                }
            }
        }
        touched.sort_unstable();
        for j in touched {
            let w = acc[j] / t;
            acc[j] = 0.0;
            if w > 0.0 {
                edges.push((i, j, w));
            }
        }
    }
    WeightedGraph::from_edges(first.node_ids.clone(), edges)
}
