//! Training loop with early stopping, and inductive prediction.

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use super::adam::AdamState;
use super::model::{
    backward, balanced_loss, forward, forward_with_plan, loss, softmax, Mode, SageParams,
};
use super::sampling::SamplingPlan;
use crate::error::{Error, Result};
use crate::seeds;
use crate::simgraph::Topology;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub dropout: f64,
    pub neighbor_sample_size: usize,
    pub max_epochs: usize,
    /// Epochs without validation-loss improvement tolerated before stopping.
    pub patience: usize,
    /// Aggregation layers (the last one produces the two logits).
    pub num_layers: usize,
    pub hidden_size: usize,
    /// Weigh both classes equally in the early-stopping loss.
    pub balanced_validation: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            dropout: 0.1,
            neighbor_sample_size: 50,
            max_epochs: 300,
            patience: 20,
            num_layers: 2,
            hidden_size: 62,
            balanced_validation: true,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::Sage("learning_rate must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Sage("dropout must lie in [0,1)".into()));
        }
        if self.neighbor_sample_size == 0 || self.num_layers == 0 || self.hidden_size == 0 {
            return Err(Error::Sage(
                "neighbor_sample_size, num_layers and hidden_size must be ≥ 1".into(),
            ));
        }
        if self.max_epochs == 0 {
            return Err(Error::Sage("max_epochs must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// One optimization batch: a graph, node features, and labeled target nodes
/// under a fixed sampling plan.
pub struct Batch<'a> {
    pub topo: &'a Topology,
    pub features: &'a Array2<f64>,
    pub targets: &'a [usize],
    pub labels: &'a [u8],
    pub plan: &'a SamplingPlan,
}

/// Backpropagate through the batch's fixed computation graph and apply one
/// Adam step. Returns the batch loss before the update.
pub fn train_step(
    params: &mut SageParams,
    adam: &mut AdamState,
    batch: &Batch<'_>,
    learning_rate: f64,
) -> Result<f64> {
    let cache = forward_with_plan(params, batch.topo, batch.features, batch.plan)?;
    let logits = cache.logits.select(Axis(0), batch.targets);
    let l = loss(&logits, batch.labels);
    if !l.is_finite() {
        return Err(Error::Sage(format!(
            "non-finite training loss {l} at Adam step {}",
            adam.step + 1
        )));
    }
    let grads = backward(params, batch.plan, &cache, batch.targets, batch.labels);
    adam.update(params, &grads, learning_rate);
    Ok(l)
}

/// Node indices used for fitting and for early stopping.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSplit {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub validation_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub params: SageParams,
    pub config: TrainConfig,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    /// Sampling seed used for every evaluation-mode pass.
    pub inference_seed: u64,
}

/// Train from `cfg.seed` until `max_epochs` or until validation loss fails to
/// improve for more than `patience` epochs; keep the best-validation weights.
pub fn fit(
    topo: &Topology,
    features: &Array2<f64>,
    labels: &[u8],
    split: &NodeSplit,
    cfg: &TrainConfig,
) -> Result<TrainedModel> {
    cfg.validate()?;
    if labels.len() != topo.len() || features.nrows() != topo.len() {
        return Err(Error::Sage(format!(
            "{} labels and {} feature rows for {} nodes",
            labels.len(),
            features.nrows(),
            topo.len()
        )));
    }
    if split.train.is_empty() {
        return Err(Error::Sage("empty training set".into()));
    }
    if split.train.iter().chain(&split.validation).any(|&v| v >= topo.len()) {
        return Err(Error::Sage("split refers to unknown nodes".into()));
    }
    if split.validation.iter().any(|v| split.train.contains(v)) {
        return Err(Error::Sage("training and validation nodes overlap".into()));
    }
    let train_labels: Vec<u8> = split.train.iter().map(|&v| labels[v]).collect();
    if train_labels.iter().all(|&y| y == train_labels[0]) {
        return Err(Error::Sage("training set contains a single class".into()));
    }
    let (monitor, monitor_labels): (&[usize], Vec<u8>) = if split.validation.is_empty() {
        (&split.train, train_labels.clone())
    } else {
        (
            &split.validation,
            split.validation.iter().map(|&v| labels[v]).collect(),
        )
    };

    let dims = SageParams::layer_dims(features.ncols(), cfg.hidden_size, cfg.num_layers);
    let mut params = SageParams::init(&dims, cfg.seed);
    let mut adam = AdamState::new(&params);
    let inference_seed = seeds::derive(cfg.seed, "inference");
    let eval_plan = SamplingPlan::new(topo, cfg.num_layers, cfg.neighbor_sample_size, inference_seed);

    let mut best = (f64::INFINITY, params.clone(), 0usize);
    let mut stale = 0usize;
    let mut history = Vec::new();
    for epoch in 1..=cfg.max_epochs {
        let epoch_seed = seeds::derive_n(cfg.seed, &[epoch as u64]);
        let plan = SamplingPlan::new(topo, cfg.num_layers, cfg.neighbor_sample_size, epoch_seed)
            .with_dropout(topo, &params.hidden_widths(), cfg.dropout, epoch_seed);
        let batch = Batch {
            topo,
            features,
            targets: &split.train,
            labels: &train_labels,
            plan: &plan,
        };
        let train_loss = train_step(&mut params, &mut adam, &batch, cfg.learning_rate)?;

        let cache = forward_with_plan(&params, topo, features, &eval_plan)?;
        let monitored = cache.logits.select(Axis(0), monitor);
        let val_loss = if cfg.balanced_validation {
            balanced_loss(&monitored, &monitor_labels)
        } else {
            loss(&monitored, &monitor_labels)
        };
        if !val_loss.is_finite() {
            return Err(Error::Sage(format!("non-finite validation loss at epoch {epoch}")));
        }
        history.push(EpochRecord {
            epoch,
            train_loss,
            validation_loss: val_loss,
        });
        if val_loss < best.0 {
            best = (val_loss, params.clone(), epoch);
            stale = 0;
        } else {
            stale += 1;
            if stale > cfg.patience {
                break;
            }
        }
    }
    Ok(TrainedModel {
        params: best.1,
        config: cfg.clone(),
        history,
        best_epoch: best.2,
        inference_seed,
    })
}

/// Class probabilities (`|nodes| × 2`) from an evaluation-mode pass.
pub fn predict_proba(
    model: &TrainedModel,
    topo: &Topology,
    features: &Array2<f64>,
    nodes: &[usize],
) -> Result<Array2<f64>> {
    let logits = forward(
        &model.params,
        topo,
        features,
        nodes,
        Mode::Eval {
            seed: model.inference_seed,
        },
        model.config.neighbor_sample_size,
    )?;
    Ok(softmax(&logits))
}

/// Probability of the positive class for each node.
pub fn predict(
    model: &TrainedModel,
    topo: &Topology,
    features: &Array2<f64>,
    nodes: &[usize],
) -> Result<Vec<f64>> {
    Ok(predict_proba(model, topo, features, nodes)?.column(1).to_vec())
}
