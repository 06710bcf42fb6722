//! Post-hoc analysis of the patient graph: local clustering coefficients,
//! LCC-cutoff clusters, per-cluster summaries with rank-sum tests and
//! Kaplan-Meier time-to-transfer curves.

mod lcc;
mod ranksum;
mod summary;
mod survival;

pub use lcc::{lcc, lcc_cluster, lcc_histogram, BinaryGraph, Membership};
pub use ranksum::{rank_sum, rank_sum_exact, rank_sum_normal, RankSum, EXACT_LIMIT};
pub use summary::{cluster_summary, cluster_survival, summary_row, ClusterReport, GroupStat, SummaryRow, SUMMARY_DAYS};
pub use survival::{kaplan_meier, SurvivalCurve};

/// Default binarization floor for edge weights.
pub const DEFAULT_WEIGHT_FLOOR: f64 = 0.014;

/// Default LCC cutoff for the high-risk cluster.
pub const DEFAULT_LCC_CUTOFF: f64 = 0.75;
