use crate::simgraph::Adjacency;

/// Unweighted, undirected view of a graph: an edge wherever either direction
/// has weight strictly above the floor.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryGraph {
    pub node_ids: Vec<String>,
    /// Sorted neighbor indices per node, no self-loops.
    pub adj: Vec<Vec<usize>>,
}

impl BinaryGraph {
    pub fn from_adjacency<G: Adjacency + ?Sized>(graph: &G, weight_floor: f64) -> Self {
        let edges = (0..graph.len())
            .flat_map(|i| graph.out_edges(i).into_iter().map(move |(j, w)| (i, j, w)));
        Self::from_edges(graph.node_ids().to_vec(), edges.collect::<Vec<_>>(), weight_floor)
    }

    /// Build from an explicit edge list over `node_ids`; direction is ignored.
    pub fn from_edges(
        node_ids: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        weight_floor: f64,
    ) -> Self {
        let mut adj = vec![Vec::new(); node_ids.len()];
        for (i, j, w) in edges {
            if i != j && w > weight_floor {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
        }
        BinaryGraph { node_ids, adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Number of edges among the neighbors of `v`.
    pub fn triangles(&self, v: usize) -> usize {
        let nv = &self.adj[v];
        let twice: usize = nv.iter().map(|&u| sorted_intersection(nv, &self.adj[u])).sum();
        twice / 2
    }

    /// Local clustering coefficient of every node.
    pub fn lcc(&self) -> Vec<f64> {
        (0..self.len())
            .map(|v| {
                let d = self.degree(v);
                if d < 2 {
                    0.0
                } else {
                    2.0 * self.triangles(v) as f64 / (d * (d - 1)) as f64
                }
            })
            .collect()
    }

    /// Subgraph induced by the nodes with `keep[i]`, renumbered in order.
    pub fn induced(&self, keep: &[bool]) -> BinaryGraph {
        let mut new_index = vec![usize::MAX; self.len()];
        let mut node_ids = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                new_index[i] = node_ids.len();
                node_ids.push(self.node_ids[i].clone());
            }
        }
        let adj = (0..self.len())
            .filter(|&i| keep[i])
            .map(|i| {
                self.adj[i]
                    .iter()
                    .filter(|&&j| keep[j])
                    .map(|&j| new_index[j])
                    .collect()
            })
            .collect();
        BinaryGraph { node_ids, adj }
    }
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Local clustering coefficient per node after binarizing at `weight_floor`
/// (directed graphs are symmetrized by union).
pub fn lcc<G: Adjacency + ?Sized>(graph: &G, weight_floor: f64) -> Vec<f64> {
    BinaryGraph::from_adjacency(graph, weight_floor).lcc()
}

/// Nodes split by an LCC cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub high_risk: Vec<bool>,
    /// Mean LCC computed inside the subgraph induced by the high-risk nodes;
    /// `None` when that cluster is empty.
    pub induced_mean_lcc: Option<f64>,
}

impl Membership {
    pub fn high_risk_ids<'a>(&self, node_ids: &'a [String]) -> Vec<&'a str> {
        node_ids
            .iter()
            .zip(&self.high_risk)
            .filter(|(_, &h)| h)
            .map(|(id, _)| id.as_str())
            .collect()
    }

    pub fn n_high_risk(&self) -> usize {
        self.high_risk.iter().filter(|&&h| h).count()
    }
}

/// High-risk cluster: nodes with `lcc ≥ cutoff`.
pub fn lcc_cluster(graph: &BinaryGraph, lcc_values: &[f64], cutoff: f64) -> Membership {
    assert_eq!(lcc_values.len(), graph.len(), "one LCC value per node");
    let high_risk: Vec<bool> = lcc_values.iter().map(|&c| c >= cutoff).collect();
    let sub = graph.induced(&high_risk);
    let induced_mean_lcc = if sub.is_empty() {
        None
    } else {
        let v = sub.lcc();
        Some(v.iter().sum::<f64>() / v.len() as f64)
    };
    Membership {
        high_risk,
        induced_mean_lcc,
    }
}

/// Counts of LCC values in `bins` equal-width bins over `[0, 1]`; 1.0 falls in
/// the last bin.
pub fn lcc_histogram(lcc_values: &[f64], bins: usize) -> Vec<usize> {
    let mut h = vec![0; bins];
    if bins == 0 {
        return h;
    }
    for &c in lcc_values {
        let b = ((c * bins as f64) as usize).min(bins - 1);
        h[b] += 1;
    }
    h
}
