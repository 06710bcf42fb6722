//! Drivers behind the command-line subcommands: `generate`, `run`, `analyze`
//! and `report`.
//!
//! Every artifact starts with a `# config_hash=<sha256>` line identifying the
//! configuration that produced it (JSON artifacts carry it as a field).

mod analyze;
mod config;
mod generate;
mod report;
mod run;

pub use analyze::{cmd_analyze, read_predictions, AnalyzeOutcome};
pub use config::{
    AnalysisSettings, BaselineSettings, GraphSettings, InferenceGraph, InputPaths, PipelineConfig, SplitSettings,
    SubSeeds, Variant,
};
pub use generate::{cmd_generate, cohort_summary_table};
pub use report::{cmd_report, collect_reports, report_table};
pub use run::{
    analysis_graph, build_task_graph, cmd_run, execute, prepare_risk_set, write_predictions,
    write_run, Prediction, RunOutput, RunReport, TaskGraph,
};

use std::path::Path;

use crate::cohort::{generate_synthetic_cohort, load_cohort, Cohort};
use crate::error::{Error, Result};

/// Load the configured cohort files, or generate the synthetic cohort.
/// `cfg` must be resolved.
pub fn load_or_generate(cfg: &PipelineConfig) -> Result<Cohort> {
    match (&cfg.input, &cfg.generate) {
        (Some(p), None) => load_cohort(&p.vitals, &p.patients),
        (None, Some(g)) => generate_synthetic_cohort(g),
        _ => Err(Error::Config("exactly one of [input] and [generate] is required".into())),
    }
}

pub(crate) fn preamble(hash: &str) -> String {
    format!("config_hash={hash}")
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
