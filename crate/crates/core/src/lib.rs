//! Progressive hospital-transfer risk prediction on temporal patient-similarity
//! graphs.
//!
//! The crate is organised as a pipeline:
//!
//! * [`cohort`]: patient records, CSV ingestion, daily risk sets and a
//!   synthetic cohort generator.
//! * [`preprocess`]: chained-equation imputation, SMOTE, standardization and
//!   stratified splitting.
//! * [`simgraph`]: k-neighbor Gaussian-kernel graphs, transition matrices and
//!   temporal (mean or diffusion) aggregation.
//! * [`sage`]: an inductive mean-aggregator graph network trained with Adam.
//! * [`baselines`]: logistic regression and k-nearest-neighbor classifiers.
//! * [`eval`]: ROC, AUC, sensitivity and specificity.
//! * [`analysis`]: local clustering coefficients, rank-sum tests and
//!   Kaplan-Meier curves.
//! * [`pipeline`]: the `generate` / `run` / `analyze` / `report` drivers used
//!   by the command-line front end.

pub mod analysis;
pub mod baselines;
pub mod cohort;
pub mod error;
pub mod eval;
mod linalg;
pub mod pipeline;
pub mod preprocess;
pub mod sage;
pub mod seeds;
pub mod simgraph;

pub use error::{Error, Result};
