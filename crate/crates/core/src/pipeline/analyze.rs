use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::config::PipelineConfig;
use super::run::Prediction;
use super::{load_or_generate, preamble, write_text};
use crate::analysis::{lcc_cluster, summary_row, BinaryGraph, ClusterReport};
use crate::error::{Error, Result};
use crate::simgraph::read_edge_list;

/// Cluster report plus whether the high-risk cluster came out empty.
#[derive(Debug, Clone)]
pub struct AnalyzeOutcome {
    pub report: ClusterReport,
    pub empty_high_risk: bool,
}

pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(file);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

fn require(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "missing artifact {}; run the `run` command first",
            path.display()
        )))
    }
}

/// LCC, cutoff cluster, per-cluster summary and Kaplan-Meier curves on the
/// analysis graph written by a previous run.
pub fn cmd_analyze(cfg: &PipelineConfig) -> Result<AnalyzeOutcome> {
    let cfg = cfg.resolved()?;
    let hash = cfg.hash()?;
    let dir = cfg.run_dir();
    let edges_path = dir.join("analysis_edges.csv");
    let preds_path = dir.join("predictions.csv");
    require(&edges_path)?;
    require(&preds_path)?;

    let cohort = load_or_generate(&cfg)?;
    let node_ids: Vec<String> = cohort.patients.iter().map(|p| p.id.clone()).collect();
    let index: HashMap<&str, usize> = node_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let list = read_edge_list(&edges_path)?;
    let to_cohort = list
        .node_ids
        .iter()
        .map(|id| {
            index.get(id.as_str()).copied().ok_or_else(|| {
                Error::Analysis(format!("edge list node {id} is not in the cohort"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let edges = list
        .edges
        .iter()
        .map(|&(i, j, w)| (to_cohort[i], to_cohort[j], w));
    let graph = BinaryGraph::from_edges(node_ids.clone(), edges.collect::<Vec<_>>(), cfg.analysis.weight_floor);
    let lcc = graph.lcc();
    let membership = lcc_cluster(&graph, &lcc, cfg.analysis.lcc_cutoff);

    let mut report = ClusterReport::build(
        &cohort,
        &node_ids,
        &lcc,
        &membership,
        cfg.analysis.lcc_cutoff,
        cfg.analysis.weight_floor,
    )?;
    report.config_hash = Some(hash.clone());
    let scores: HashMap<String, f64> = read_predictions(&preds_path)?
        .into_iter()
        .map(|p| (p.id, p.score))
        .collect();
    let predicted: Vec<Option<f64>> = node_ids.iter().map(|id| scores.get(id).copied()).collect();
    report
        .rows
        .push(summary_row("predicted_risk", &predicted, &membership.high_risk));

    let empty_high_risk = membership.n_high_risk() == 0;
    if empty_high_risk {
        log::warn!(
            "analyze: no node reaches LCC {}; the high-risk cluster is empty",
            cfg.analysis.lcc_cutoff
        );
    }

    let out = dir.join("analysis");
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let pre = preamble(&hash);
    write_text(&out.join("cluster_report.txt"), &report.to_text())?;
    write_text(
        &out.join("cluster_report.json"),
        &(serde_json::to_string_pretty(&report)? + "\n"),
    )?;
    let mut lcc_csv = format!("# {pre}\nid,lcc,high_risk\n");
    for ((id, c), h) in node_ids.iter().zip(&lcc).zip(&membership.high_risk) {
        let _ = writeln!(lcc_csv, "{id},{c},{}", u8::from(*h));
    }
    write_text(&out.join("lcc.csv"), &lcc_csv)?;
    for (name, curve) in [("km_high_risk.csv", &report.km_high_risk), ("km_other.csv", &report.km_other)] {
        if let Some(c) = curve {
            c.write_csv(out.join(name), Some(&pre))?;
        }
    }
    Ok(AnalyzeOutcome {
        report,
        empty_high_risk,
    })
}
