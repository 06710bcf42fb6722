//! Inductive graph network with mean aggregation.
//!
//! Layer `k` maps every node `v` to
//!
//! ```text
//! h_v^k = σ(W^k · [h_v^{k-1} ; mean_{u ∈ S_k(v)} h_u^{k-1}])
//! ```
//!
//! where `S_k(v)` is a uniform sample of at most `neighbor_sample_size`
//! neighbors (or `{v}` when `v` has none). `σ` is ReLU on hidden layers and
//! the identity on the output layer; there are no bias terms. Logits feed a
//! two-class softmax cross-entropy averaged over labeled nodes.
//!
//! Neighbor samples are drawn from a per-node random stream keyed by the
//! node id, so a node's output depends only on its own K-hop neighborhood
//! and not on how the rest of the graph is numbered.

mod adam;
mod checkpoint;
mod model;
mod sampling;
mod train;

pub use adam::AdamState;
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use model::{backward, balanced_loss, forward, forward_with_plan, loss, mean_aggregate, ForwardCache, Mode, SageParams};
pub use sampling::{sample_neighbors, SamplingPlan};
pub use train::{
    fit, predict, predict_proba, train_step, Batch, EpochRecord, NodeSplit, TrainConfig, TrainedModel,
};
