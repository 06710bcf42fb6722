use ndarray::{s, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::SamplingPlan;
use crate::error::{Error, Result};
use crate::seeds;
use crate::simgraph::Topology;

/// Layer weights. `weights[k]` has shape `d_out × 2·d_in` and acts on the
/// concatenation `[self ; aggregated neighbors]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SageParams {
    pub weights: Vec<Array2<f64>>,
}

impl SageParams {
    /// Layer widths `[d0, hidden, …, 2]` for `num_layers` aggregation layers.
    pub fn layer_dims(input_dim: usize, hidden: usize, num_layers: usize) -> Vec<usize> {
        let mut dims = vec![input_dim];
        dims.extend(std::iter::repeat_n(hidden, num_layers.saturating_sub(1)));
        dims.push(2);
        dims
    }

    pub fn zeros(dims: &[usize]) -> Self {
        SageParams {
            weights: dims
                .windows(2)
                .map(|w| Array2::zeros((w[1], 2 * w[0])))
                .collect(),
        }
    }

    /// Glorot-uniform initialization.
    pub fn init(dims: &[usize], seed: u64) -> Self {
        let mut rng = seeds::rng(seeds::derive(seed, "init"));
        let weights = dims
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (2 * w[0], w[1]);
                let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
                Array2::from_shape_fn((fan_out, fan_in), |_| rng.random_range(-a..a))
            })
            .collect();
        SageParams { weights }
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn input_dim(&self) -> usize {
        self.weights[0].ncols() / 2
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.input_dim()];
        d.extend(self.weights.iter().map(|w| w.nrows()));
        d
    }

    pub fn hidden_widths(&self) -> Vec<usize> {
        self.weights[..self.num_layers() - 1]
            .iter()
            .map(|w| w.nrows())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
    }

    fn check(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::Sage("model has no layers".into()));
        }
        for (k, pair) in self.weights.windows(2).enumerate() {
            if pair[1].ncols() != 2 * pair[0].nrows() {
                return Err(Error::Sage(format!(
                    "layer {} expects input width {}, layer {} produces {}",
                    k + 2,
                    pair[1].ncols() / 2,
                    k + 1,
                    pair[0].nrows()
                )));
            }
        }
        Ok(())
    }
}

/// Elementwise mean of a non-empty list of vectors.
pub fn mean_aggregate(vectors: &[&[f64]]) -> Vec<f64> {
    let d = vectors.first().map_or(0, |v| v.len());
    let mut out = vec![0.0; d];
    for v in vectors {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += x;
        }
    }
    let n = vectors.len() as f64;
    out.iter_mut().for_each(|o| *o /= n);
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Neighbor sampling plus dropout drawn from `seed`.
    Train { seed: u64, dropout: f64 },
    /// Neighbor sampling from the frozen `seed`, no dropout.
    Eval { seed: u64 },
}

/// Intermediate values of a forward pass, retained for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// `concat[k]`: `n × 2·d_in` input of layer `k`.
    pub concat: Vec<Array2<f64>>,
    /// `pre[k]`: `n × d_out` pre-activations of layer `k`.
    pub pre: Vec<Array2<f64>>,
    /// Final-layer outputs for every node.
    pub logits: Array2<f64>,
}

/// Run every layer over every node of `topo` under a fixed plan.
pub fn forward_with_plan(
    params: &SageParams,
    topo: &Topology,
    features: &Array2<f64>,
    plan: &SamplingPlan,
) -> Result<ForwardCache> {
    params.check()?;
    if features.nrows() != topo.len() {
        return Err(Error::Sage(format!(
            "{} feature rows for {} graph nodes",
            features.nrows(),
            topo.len()
        )));
    }
    if features.ncols() != params.input_dim() {
        return Err(Error::Sage(format!(
            "feature dimension {} does not match model input {}",
            features.ncols(),
            params.input_dim()
        )));
    }
    if plan.num_layers() != params.num_layers() {
        return Err(Error::Sage("sampling plan depth does not match model".into()));
    }
    let n = topo.len();
    let last = params.num_layers() - 1;
    let mut h = features.clone();
    let mut concat = Vec::with_capacity(params.num_layers());
    let mut pre = Vec::with_capacity(params.num_layers());
    for (k, w) in params.weights.iter().enumerate() {
        let d = h.ncols();
        let mut c = Array2::zeros((n, 2 * d));
        c.slice_mut(s![.., ..d]).assign(&h);
        for v in 0..n {
            let sample = &plan.samples[k][v];
            let mut agg = c.slice_mut(s![v, d..]);
            for &u in sample {
                agg += &h.row(u);
            }
            agg /= sample.len() as f64;
        }
        let z = c.dot(&w.t());
        h = if k < last {
            let mut a = z.mapv(|x| x.max(0.0));
            if let Some(mask) = &plan.masks[k] {
                a *= mask;
            }
            a
        } else {
            z.clone()
        };
        concat.push(c);
        pre.push(z);
    }
    Ok(ForwardCache {
        concat,
        pre,
        logits: h,
    })
}

/// Logits (`|nodes| × 2`) for the requested nodes.
pub fn forward(
    params: &SageParams,
    topo: &Topology,
    features: &Array2<f64>,
    nodes: &[usize],
    mode: Mode,
    sample_size: usize,
) -> Result<Array2<f64>> {
    if let Some(&bad) = nodes.iter().find(|&&v| v >= topo.len()) {
        return Err(Error::Sage(format!("unknown node index {bad}")));
    }
    let plan = match mode {
        Mode::Train { seed, dropout } => SamplingPlan::new(topo, params.num_layers(), sample_size, seed)
            .with_dropout(topo, &params.hidden_widths(), dropout, seed),
        Mode::Eval { seed } => SamplingPlan::new(topo, params.num_layers(), sample_size, seed),
    };
    let cache = forward_with_plan(params, topo, features, &plan)?;
    Ok(cache.logits.select(Axis(0), nodes))
}

fn log_softmax_row(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + z.iter().map(|x| (x - m).exp()).sum::<f64>().ln();
    z.iter().map(|x| x - lse).collect()
}

/// Mean softmax cross-entropy of `logits` (one row per labeled node).
pub fn loss(logits: &Array2<f64>, labels: &[u8]) -> f64 {
    assert_eq!(logits.nrows(), labels.len(), "one label per logit row");
    if labels.is_empty() {
        return 0.0;
    }
    let total: f64 = logits
        .rows()
        .into_iter()
        .zip(labels)
        .map(|(row, &y)| -log_softmax_row(&row.to_vec())[y as usize])
        .sum();
    total / labels.len() as f64
}

/// Mean over classes of the per-class mean cross-entropy, so that each class
/// present in `labels` weighs equally.
pub fn balanced_loss(logits: &Array2<f64>, labels: &[u8]) -> f64 {
    assert_eq!(logits.nrows(), labels.len(), "one label per logit row");
    let mut sums = [0.0; 2];
    let mut counts = [0usize; 2];
    for (row, &y) in logits.rows().into_iter().zip(labels) {
        sums[y as usize] += -log_softmax_row(&row.to_vec())[y as usize];
        counts[y as usize] += 1;
    }
    let present: Vec<f64> = (0..2)
        .filter(|&c| counts[c] > 0)
        .map(|c| sums[c] / counts[c] as f64)
        .collect();
    if present.is_empty() {
        0.0
    } else {
        present.iter().sum::<f64>() / present.len() as f64
    }
}

pub(crate) fn softmax(logits: &Array2<f64>) -> Array2<f64> {
    let mut p = logits.clone();
    for mut row in p.rows_mut() {
        let ls = log_softmax_row(&row.to_vec());
        row.iter_mut().zip(ls).for_each(|(x, l)| *x = l.exp());
    }
    p
}

/// Gradients of the mean cross-entropy over `targets` with respect to every
/// layer's weights, under the plan that produced `cache`.
pub fn backward(
    params: &SageParams,
    plan: &SamplingPlan,
    cache: &ForwardCache,
    targets: &[usize],
    labels: &[u8],
) -> Vec<Array2<f64>> {
    let n = cache.logits.nrows();
    let l = targets.len().max(1) as f64;
    let probs = softmax(&cache.logits);
    let mut dz = Array2::zeros((n, 2));
    for (&v, &y) in targets.iter().zip(labels) {
        for c in 0..2 {
            dz[[v, c]] += (probs[[v, c]] - f64::from(u8::from(c == y as usize))) / l;
        }
    }
    let mut grads = vec![Array2::zeros((0, 0)); params.num_layers()];
    for k in (0..params.num_layers()).rev() {
        grads[k] = dz.t().dot(&cache.concat[k]);
        if k == 0 {
            break;
        }
        let dc = dz.dot(&params.weights[k]);
        let d = dc.ncols() / 2;
        let mut dh = dc.slice(s![.., ..d]).to_owned();
        for v in 0..n {
            let sample = &plan.samples[k][v];
            let scale = 1.0 / sample.len() as f64;
            let g = dc.slice(s![v, d..]);
            for &u in sample {
                dh.row_mut(u).scaled_add(scale, &g);
            }
        }
        // through dropout and ReLU of layer k-1
        if let Some(mask) = &plan.masks[k - 1] {
            dh *= mask;
        }
        dh.zip_mut_with(&cache.pre[k - 1], |g, &z| {
            if z <= 0.0 {
                *g = 0.0;
            }
        });
        dz = dh;
    }
    grads
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn path(n: usize) -> Topology {
        let ids = (0..n).map(|i| format!("n{i}")).collect();
        let adj = (0..n)
            .map(|i| {
                let mut r = Vec::new();
                if i > 0 {
                    r.push(i - 1);
                }
                if i + 1 < n {
                    r.push(i + 1);
                }
                r
            })
            .collect();
        Topology::from_lists(ids, adj).unwrap()
    }

    #[test]
    fn mean_aggregate_cases() {
        assert_eq!(mean_aggregate(&[&[1.0, 2.0], &[1.0, 2.0]]), vec![1.0, 2.0]);
        assert_eq!(mean_aggregate(&[&[0.0, 2.0], &[2.0, 0.0]]), vec![1.0, 1.0]);
        assert_eq!(mean_aggregate(&[&[3.5]]), vec![3.5]);
    }

    #[test]
    fn zero_weights_give_zero_logits() {
        let t = path(5);
        let x = Array2::from_shape_fn((5, 3), |(i, j)| (i + j) as f64);
        let p = SageParams::zeros(&SageParams::layer_dims(3, 4, 2));
        let out = forward(&p, &t, &x, &[0, 2, 4], Mode::Eval { seed: 1 }, 50).unwrap();
        assert_eq!(out.dim(), (3, 2));
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn self_fallback_identity_layer() {
        // isolated node, K = 1, W = [I | I] → output 2x (identity activation)
        let t = Topology::from_lists(vec!["a".into()], vec![vec![]]).unwrap();
        let x = array![[0.7, -1.2]];
        let p = SageParams {
            weights: vec![array![[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]]],
        };
        let out = forward(&p, &t, &x, &[0], Mode::Eval { seed: 0 }, 50).unwrap();
        assert_eq!(out, array![[1.4, -2.4]]);
    }

    #[test]
    fn dimension_mismatch() {
        let t = path(3);
        let x = Array2::zeros((3, 2));
        let p = SageParams::zeros(&SageParams::layer_dims(3, 4, 2));
        assert!(forward(&p, &t, &x, &[0], Mode::Eval { seed: 0 }, 5).is_err());
        let x = Array2::zeros((3, 3));
        assert!(forward(&p, &t, &x, &[7], Mode::Eval { seed: 0 }, 5).is_err());
    }

    #[test]
    fn loss_values() {
        let uniform = array![[0.3, 0.3], [-2.0, -2.0]];
        assert!((loss(&uniform, &[0, 1]) - 2f64.ln()).abs() < 1e-12);
        let l = loss(&array![[1.0, 0.0]], &[0]);
        assert!((l - (1.0 + (-1f64).exp()).ln()).abs() < 1e-12);
        assert!((l - 0.31326).abs() < 1e-5);
        let big = loss(&array![[1000.0, 0.0]], &[0]);
        assert!(big.is_finite() && big < 1e-300);
    }

    #[test]
    fn layer_dims_and_init() {
        assert_eq!(SageParams::layer_dims(15, 62, 2), vec![15, 62, 2]);
        assert_eq!(SageParams::layer_dims(15, 62, 3), vec![15, 62, 62, 2]);
        let p = SageParams::init(&[15, 62, 2], 3);
        assert_eq!(p.weights[0].dim(), (62, 30));
        assert_eq!(p.weights[1].dim(), (2, 124));
        assert_eq!(p.dims(), vec![15, 62, 2]);
        assert_eq!(p, SageParams::init(&[15, 62, 2], 3));
    }
}
