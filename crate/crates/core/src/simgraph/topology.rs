use std::collections::VecDeque;

use super::Adjacency;
use crate::error::{Error, Result};

/// Unweighted neighbor lists used by the graph network's sampler.
///
/// An edge `i → j` exists when the source graph has weight above the floor.
/// Neighbor lists are kept in node-id order so that sampling by position does
/// not depend on how nodes happen to be numbered.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub node_ids: Vec<String>,
    pub adj: Vec<Vec<usize>>,
}

impl Topology {
    pub fn from_graph<G: Adjacency + ?Sized>(graph: &G, weight_floor: f64) -> Self {
        let adj = (0..graph.len())
            .map(|i| {
                graph
                    .out_edges(i)
                    .into_iter()
                    .filter(|&(_, w)| w > weight_floor)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        Topology::canonical(graph.node_ids().to_vec(), adj)
    }

    fn canonical(node_ids: Vec<String>, mut adj: Vec<Vec<usize>>) -> Self {
        for row in &mut adj {
            row.sort_by(|&a, &b| node_ids[a].cmp(&node_ids[b]));
        }
        Topology { node_ids, adj }
    }

    pub fn from_lists(node_ids: Vec<String>, adj: Vec<Vec<usize>>) -> Result<Self> {
        if node_ids.len() != adj.len() {
            return Err(Error::Graph(format!(
                "{} ids but {} adjacency lists",
                node_ids.len(),
                adj.len()
            )));
        }
        let n = node_ids.len();
        if let Some((i, j)) = adj
            .iter()
            .enumerate()
            .find_map(|(i, row)| row.iter().find(|&&j| j >= n || j == i).map(|&j| (i, j)))
        {
            return Err(Error::Graph(format!("invalid edge {i} → {j}")));
        }
        Ok(Topology::canonical(node_ids, adj))
    }

    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.node_ids.iter().position(|n| n == id)
    }

    /// Block-diagonal union: `other`'s nodes follow `self`'s and no edges
    /// cross between the two parts.
    pub fn disjoint_union(&self, other: &Topology) -> Topology {
        let offset = self.len();
        let mut node_ids = self.node_ids.clone();
        node_ids.extend(other.node_ids.iter().cloned());
        let mut adj = self.adj.clone();
        adj.extend(
            other
                .adj
                .iter()
                .map(|row| row.iter().map(|&j| j + offset).collect()),
        );
        Topology { node_ids, adj }
    }

    /// Hop distance from any node in `sources` along out-edges, `None` if
    /// unreachable.
    pub fn hops_from(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s] = Some(0);
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued nodes have a distance");
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgraph::WeightedGraph;

    #[test]
    fn floor_and_union() {
        let ids: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let g = WeightedGraph::from_edges(ids.clone(), [(0, 1, 0.5), (1, 2, 0.01)]).unwrap();
        let t = Topology::from_graph(&g, 0.014);
        assert_eq!(t.adj, vec![vec![1], vec![0], vec![]]);
        let u = t.disjoint_union(&t);
        assert_eq!(u.len(), 6);
        assert_eq!(u.adj[3], vec![4]);
        assert_eq!(u.hops_from(&[0]), vec![Some(0), Some(1), None, None, None, None]);
        assert!(Topology::from_lists(ids, vec![vec![0], vec![], vec![]]).is_err());
    }
}
