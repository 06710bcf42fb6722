//! Patient-similarity graphs.
//!
//! Daily graphs connect each patient to its `k` nearest neighbors (in either
//! direction) with Gaussian-kernel weights. A day-`T` task then combines the
//! daily graphs either by averaging edge weights or by truncated diffusion
//! over the daily transition matrices.

mod diffusion;
mod export;
mod knn;
mod topology;
mod weighted;

pub use diffusion::{diffusion_aggregate, transition, DiffusionGraph, TransitionMatrix};
pub use export::{read_edge_list, write_edge_list, EdgeList};
pub use knn::{gaussian_weights, knn_edges, knn_graph, Alpha, EdgeSet, KernelConfig};
pub use topology::Topology;
pub use weighted::{aggregate_mean, WeightedGraph};

use crate::error::{Error, Result};

/// Read access to a weighted adjacency over an ordered node set.
pub trait Adjacency {
    fn node_ids(&self) -> &[String];

    /// Outgoing `(neighbor, weight)` pairs of node `i` with positive weight,
    /// excluding `i` itself.
    fn out_edges(&self, i: usize) -> Vec<(usize, f64)>;

    fn is_directed(&self) -> bool;

    fn len(&self) -> usize {
        self.node_ids().len()
    }

    fn is_empty(&self) -> bool {
        self.node_ids().is_empty()
    }

    fn index_of(&self, id: &str) -> Option<usize> {
        self.node_ids().iter().position(|n| n == id)
    }
}

/// Neighbors of `node` with weight strictly above `weight_floor`, heaviest
/// first (ties by node index).
pub fn neighborhood<G: Adjacency + ?Sized>(
    graph: &G,
    node: &str,
    weight_floor: f64,
) -> Result<Vec<(String, f64)>> {
    if !(weight_floor >= 0.0) {
        return Err(Error::Graph(format!("weight_floor must be ≥ 0, got {weight_floor}")));
    }
    let i = graph
        .index_of(node)
        .ok_or_else(|| Error::Graph(format!("unknown node id {node}")))?;
    let mut nbrs: Vec<(usize, f64)> = graph
        .out_edges(i)
        .into_iter()
        .filter(|&(_, w)| w > weight_floor)
        .collect();
    nbrs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(nbrs
        .into_iter()
        .map(|(j, w)| (graph.node_ids()[j].clone(), w))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("n{i}")).collect()
    }

    #[test]
    fn neighborhood_floor_and_order() {
        let g = WeightedGraph::from_edges(
            ids(4),
            [(0, 1, 0.5), (0, 2, 0.01), (0, 3, 0.9)],
        )
        .unwrap();
        let all = neighborhood(&g, "n0", 0.0).unwrap();
        assert_eq!(
            all,
            vec![("n3".to_string(), 0.9), ("n1".into(), 0.5), ("n2".into(), 0.01)]
        );
        let kept = neighborhood(&g, "n0", 0.014).unwrap();
        assert_eq!(kept.len(), 2);
        assert!(neighborhood(&g, "zz", 0.0).is_err());
        assert!(neighborhood(&g, "n0", -1.0).is_err());
    }

    #[test]
    fn isolated_node_has_no_neighbors() {
        let g = WeightedGraph::from_edges(ids(3), [(0, 1, 0.5)]).unwrap();
        assert!(neighborhood(&g, "n2", 0.0).unwrap().is_empty());
    }
}
