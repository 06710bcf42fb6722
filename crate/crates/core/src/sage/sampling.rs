use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::seeds;
use crate::simgraph::Topology;

/// Uniform sample without replacement of at most `sample_size` neighbors of
/// `node`. Nodes without neighbors sample themselves.
pub fn sample_neighbors<R: Rng + ?Sized>(
    topo: &Topology,
    node: usize,
    sample_size: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if node >= topo.len() {
        return Err(Error::Sage(format!("unknown node index {node}")));
    }
    let nbrs = topo.neighbors(node);
    if nbrs.is_empty() {
        return Ok(vec![node]);
    }
    if nbrs.len() <= sample_size {
        return Ok(nbrs.to_vec());
    }
    let mut picked = rand::seq::index::sample(rng, nbrs.len(), sample_size).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|p| nbrs[p]).collect())
}

/// Neighbor samples for every layer and node, plus optional dropout masks on
/// hidden activations. Fixing a plan fixes the computation graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    /// `samples[layer][node]`.
    pub samples: Vec<Vec<Vec<usize>>>,
    /// `masks[layer]` for hidden layers (`None` on the output layer or when
    /// dropout is off). Entries are `0` or `1/(1−p)`.
    pub masks: Vec<Option<Array2<f64>>>,
}

impl SamplingPlan {
    /// Draw samples for `num_layers` layers. The stream for node `v` at layer
    /// `k` depends only on `(seed, k, id(v))`.
    pub fn new(topo: &Topology, num_layers: usize, sample_size: usize, seed: u64) -> Self {
        let samples = (0..num_layers)
            .map(|layer| {
                (0..topo.len())
                    .map(|v| {
                        let mut rng = node_rng(seed, layer, &topo.node_ids[v]);
                        sample_neighbors(topo, v, sample_size, &mut rng)
                            .expect("node index within topology")
                    })
                    .collect()
            })
            .collect();
        SamplingPlan {
            samples,
            masks: vec![None; num_layers],
        }
    }

    /// Attach inverted-dropout masks for hidden layers of the given widths.
    pub fn with_dropout(mut self, topo: &Topology, hidden_widths: &[usize], rate: f64, seed: u64) -> Self {
        if rate <= 0.0 {
            return self;
        }
        let keep = 1.0 - rate;
        for (layer, &width) in hidden_widths.iter().enumerate() {
            let mut mask = Array2::zeros((topo.len(), width));
            for v in 0..topo.len() {
                let mut rng = node_rng(seeds::derive(seed, "dropout"), layer, &topo.node_ids[v]);
                for c in 0..width {
                    if rng.random::<f64>() < keep {
                        mask[[v, c]] = 1.0 / keep;
                    }
                }
            }
            self.masks[layer] = Some(mask);
        }
        self
    }

    pub fn num_layers(&self) -> usize {
        self.samples.len()
    }
}

fn node_rng(seed: u64, layer: usize, id: &str) -> rand_chacha::ChaCha8Rng {
    seeds::rng(seeds::derive_n(seed, &[layer as u64, seeds::fnv1a(id.as_bytes())]))
}
