use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndarray::{concatenate, s, Array2, Axis};
use serde::{Deserialize, Serialize};

use super::config::{InferenceGraph, PipelineConfig, SubSeeds, Variant};
use super::{load_or_generate, preamble, write_text};
use crate::baselines::{knn_predict, logistic_fit, logistic_predict, KnnModel};
use crate::cohort::{risk_ids, risk_set, Cohort, ImputedVitals, RiskSet, N_FEATURES};
use crate::error::{Error, Result};
use crate::eval::{auc, roc_curve, sen_spe, write_roc_csv, youden_threshold, EvalReport};
use crate::preprocess::{fit_standardizer, mice_impute_temporal, smote, stratified_split};
use crate::sage::{fit, predict, save_checkpoint, Checkpoint, NodeSplit, TrainedModel};
use crate::simgraph::{
    aggregate_mean, diffusion_aggregate, knn_graph, transition, write_edge_list, Adjacency, Alpha,
    DiffusionGraph, KernelConfig, Topology, WeightedGraph,
};

/// A day-`T` graph: mean of the daily kernel graphs, or their diffusion.
#[derive(Debug, Clone, PartialEq)]
pub enum TaskGraph {
    Mean(WeightedGraph),
    Diffusion(DiffusionGraph),
}

impl TaskGraph {
    pub fn adjacency(&self) -> &dyn Adjacency {
        match self {
            TaskGraph::Mean(g) => g,
            TaskGraph::Diffusion(g) => g,
        }
    }
}

/// Columns of day `t` (0-based) in a day-major stack.
fn day_block(x: &Array2<f64>, t: usize) -> Array2<f64> {
    x.slice(s![.., t * N_FEATURES..(t + 1) * N_FEATURES]).to_owned()
}

/// Build the per-day kernel graphs over `days` day blocks of `x` and combine
/// them.
pub fn build_task_graph(
    ids: &[String],
    x: &Array2<f64>,
    days: usize,
    k: usize,
    alpha: Alpha,
    diffusion: bool,
) -> Result<TaskGraph> {
    let kernel = KernelConfig { k, alpha };
    let daily = (0..days)
        .map(|t| knn_graph(ids.to_vec(), &day_block(x, t), &kernel))
        .collect::<Result<Vec<_>>>()?;
    if diffusion {
        let transitions = daily.iter().map(transition).collect::<Result<Vec<_>>>()?;
        Ok(TaskGraph::Diffusion(diffusion_aggregate(&transitions)?))
    } else {
        Ok(TaskGraph::Mean(aggregate_mean(&daily)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config_hash: String,
    pub variant: Variant,
    pub day: u32,
    pub seed: u64,
    pub n_risk_set: usize,
    pub n_positive: usize,
    pub n_fit: usize,
    pub n_synthetic: usize,
    pub n_validation: usize,
    pub n_test: usize,
    /// Graph models only.
    pub epochs_run: Option<usize>,
    pub best_epoch: Option<usize>,
    pub eval: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub label: u8,
    pub score: f64,
}

/// Everything a run produces, before anything is written.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub predictions: Vec<Prediction>,
    pub model: Option<TrainedModel>,
    pub train_graph: Option<TaskGraph>,
    pub test_graph: Option<TaskGraph>,
    /// Diffusion graph over the whole cohort for post-hoc analysis.
    pub analysis_graph: Option<DiffusionGraph>,
    pub imputation_log: Vec<String>,
}

/// Impute the day-`day` risk set's stacked vitals and extract it.
pub fn prepare_risk_set(cohort: &Cohort, day: u32, cfg: &PipelineConfig) -> Result<(RiskSet, Vec<String>)> {
    if day > cohort.max_day() {
        return Err(Error::Config(format!(
            "day {day} exceeds the last observed day {}",
            cohort.max_day()
        )));
    }
    let ids = risk_ids(cohort, day);
    let stack = cohort.raw_stack(&ids, day)?;
    let imputed = mice_impute_temporal(&stack, N_FEATURES, &cfg.impute)?;
    let vitals = ImputedVitals::from_stack(ids, &imputed.matrix)?;
    Ok((risk_set(cohort, day, &vitals)?, imputed.diagnostics))
}

/// Standardized diffusion graph over every cohort patient for days
/// `1..=day`; days after a patient left are imputed like any other gap.
pub fn analysis_graph(cohort: &Cohort, cfg: &PipelineConfig) -> Result<DiffusionGraph> {
    let ids: Vec<String> = cohort.patients.iter().map(|p| p.id.clone()).collect();
    let stack = cohort.raw_stack(&ids, cfg.day)?;
    let imputed = mice_impute_temporal(&stack, N_FEATURES, &cfg.impute)?;
    let x = fit_standardizer(&imputed.matrix).apply(&imputed.matrix);
    match build_task_graph(&ids, &x, cfg.day as usize, cfg.graph.eval_k, cfg.graph.alpha, true)? {
        TaskGraph::Diffusion(g) => Ok(g),
        TaskGraph::Mean(_) => unreachable!("diffusion requested"),
    }
}

fn rows(x: &Array2<f64>, idx: &[usize]) -> Array2<f64> {
    x.select(Axis(0), idx)
}

fn pick<T: Clone>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i].clone()).collect()
}

/// Run one variant on one day, in memory. `cfg` must be resolved.
pub fn execute(cfg: &PipelineConfig, cohort: &Cohort, with_analysis_graph: bool) -> Result<RunOutput> {
    let seeds = SubSeeds::from_master(cfg.seed);
    let hash = cfg.hash()?;
    let day = cfg.day;
    let (rs, imputation_log) = prepare_risk_set(cohort, day, cfg)?;
    let n = rs.ids.len();

    // features: stacked daily vitals, plus age for the age variant
    let mut x = rs.features.clone();
    if cfg.variant.uses_age() {
        let ages: Vec<f64> = rs
            .ids
            .iter()
            .map(|id| cohort.get(id).map(|p| p.age as f64).unwrap_or(f64::NAN))
            .collect();
        let col = Array2::from_shape_vec((n, 1), ages).expect("one age per row");
        x = concatenate![Axis(1), x, col];
    }

    let all: Vec<usize> = (0..n).collect();
    let (train_idx, test_idx) =
        stratified_split(&all, &rs.labels, cfg.split.train_fraction, seeds.split)?;
    let train_labels = pick(&rs.labels, &train_idx);
    let (fit_idx, val_idx) = stratified_split(
        &train_idx,
        &train_labels,
        1.0 - cfg.split.validation_fraction,
        seeds.validation,
    )?;

    let scaler = fit_standardizer(&rows(&x, &train_idx));
    let xs = scaler.apply(&x);
    let (x_fit, y_fit) = smote(&rows(&xs, &fit_idx), &pick(&rs.labels, &fit_idx), &cfg.smote)?;
    let n_synthetic = x_fit.nrows() - fit_idx.len();
    let x_val = rows(&xs, &val_idx);
    let y_val = pick(&rs.labels, &val_idx);
    let x_test = rows(&xs, &test_idx);
    let y_test = pick(&rs.labels, &test_idx);
    let test_ids = pick(&rs.ids, &test_idx);

    let mut model = None;
    let mut train_graph = None;
    let mut test_graph = None;
    let (val_scores, test_scores) = match cfg.variant {
        Variant::Logistic => {
            let b = &cfg.baselines;
            let m = logistic_fit(&x_fit, &y_fit, b.l2_lambda, b.max_iters, b.tol)?;
            (logistic_predict(&m, &x_val)?, logistic_predict(&m, &x_test)?)
        }
        Variant::Knn => {
            let m = KnnModel::new(x_fit.clone(), y_fit.clone(), cfg.baselines.knn_k)?;
            (knn_predict(&m, &x_val)?, knn_predict(&m, &x_test)?)
        }
        v => {
            let diffusion = v.uses_diffusion();
            let days = day as usize;
            let (k_train, k_eval, alpha, floor) =
                (cfg.graph.train_k, cfg.graph.eval_k, cfg.graph.alpha, cfg.graph.topology_floor);

            let mut fit_ids = pick(&rs.ids, &fit_idx);
            fit_ids.extend((1..=n_synthetic).map(|i| format!("synthetic-{i:04}")));
            let g_train = build_task_graph(&fit_ids, &x_fit, days, k_train, alpha, diffusion)?;
            let topo_train = Topology::from_graph(g_train.adjacency(), floor);
            let n_fit = x_fit.nrows();

            // graph over the scored nodes, optionally joined to the training nodes;
            // returns the graph, its features and the scored nodes' indices
            let inference = |ids: &[String], x: &Array2<f64>| -> Result<(TaskGraph, Array2<f64>, Vec<usize>)> {
                match cfg.graph.inference {
                    InferenceGraph::Separate => {
                        let g = build_task_graph(ids, x, days, k_eval, alpha, diffusion)?;
                        Ok((g, x.clone(), (0..ids.len()).collect()))
                    }
                    InferenceGraph::WithTrain => {
                        let all_ids: Vec<String> = fit_ids.iter().chain(ids).cloned().collect();
                        let xa = concatenate![Axis(0), x_fit, *x];
                        let g = build_task_graph(&all_ids, &xa, days, k_eval, alpha, diffusion)?;
                        Ok((g, xa, (n_fit..n_fit + ids.len()).collect()))
                    }
                }
            };

            let val_ids = pick(&rs.ids, &val_idx);
            let (g_val, x_val_graph, val_nodes) = inference(&val_ids, &x_val)?;
            let mut topo_val = Topology::from_graph(g_val.adjacency(), floor);
            // keep ids unique across the union
            for id in &mut topo_val.node_ids {
                id.insert_str(0, "validation/");
            }
            let topo = topo_train.disjoint_union(&topo_val);
            let features = concatenate![Axis(0), x_fit, x_val_graph];
            let mut labels: Vec<u8> = y_fit.clone();
            labels.extend(std::iter::repeat_n(0u8, x_val_graph.nrows()));
            for (&v, &y) in val_nodes.iter().zip(&y_val) {
                labels[n_fit + v] = y;
            }
            let split = NodeSplit {
                train: (0..n_fit).collect(),
                validation: val_nodes.iter().map(|v| n_fit + v).collect(),
            };
            let trained = fit(&topo, &features, &labels, &split, &cfg.train)?;
            let val_scores = predict(&trained, &topo, &features, &split.validation)?;

            let (g_test, x_test_graph, test_nodes) = inference(&test_ids, &x_test)?;
            let topo_test = Topology::from_graph(g_test.adjacency(), floor);
            let test_scores = predict(&trained, &topo_test, &x_test_graph, &test_nodes)?;

            model = Some(trained);
            train_graph = Some(g_train);
            test_graph = Some(g_test);
            (val_scores, test_scores)
        }
    };

    let threshold = youden_threshold(&val_scores, &y_val)?;
    let (sensitivity, specificity) = sen_spe(&test_scores, &y_test, threshold);
    let eval = EvalReport {
        day,
        model: cfg.variant.name().to_string(),
        n_test: y_test.len(),
        n_positive: y_test.iter().filter(|&&y| y == 1).count(),
        auc: auc(&test_scores, &y_test)?,
        sensitivity,
        specificity,
        threshold,
        roc_points: roc_curve(&test_scores, &y_test)?,
    };
    let report = RunReport {
        config_hash: hash,
        variant: cfg.variant,
        day,
        seed: cfg.seed,
        n_risk_set: n,
        n_positive: rs.n_positive(),
        n_fit: fit_idx.len(),
        n_synthetic,
        n_validation: val_idx.len(),
        n_test: test_idx.len(),
        epochs_run: model.as_ref().map(|m| m.history.len()),
        best_epoch: model.as_ref().map(|m| m.best_epoch),
        eval,
    };
    let predictions = test_ids
        .into_iter()
        .zip(&y_test)
        .zip(&test_scores)
        .map(|((id, &label), &score)| Prediction { id, label, score })
        .collect();
    let analysis_graph = if with_analysis_graph {
        Some(analysis_graph(cohort, cfg)?)
    } else {
        None
    };
    Ok(RunOutput {
        report,
        predictions,
        model,
        train_graph,
        test_graph,
        analysis_graph,
        imputation_log,
    })
}

pub fn write_predictions(preds: &[Prediction], path: &Path, pre: &str) -> Result<()> {
    let mut s = format!("# {pre}\nid,label,score\n");
    for p in preds {
        let _ = writeln!(s, "{},{},{}", p.id, p.label, p.score);
    }
    write_text(path, &s)
}

/// Write all artifacts of a run under the run directory.
pub fn write_run(cfg: &PipelineConfig, out: &RunOutput) -> Result<PathBuf> {
    let dir = cfg.run_dir();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let pre = preamble(&out.report.config_hash);
    let floor = cfg.analysis.weight_floor;

    let json = serde_json::to_string_pretty(&out.report)? + "\n";
    write_text(&dir.join("report.json"), &json)?;
    write_roc_csv(&out.report.eval.roc_points, dir.join("roc.csv"), Some(&pre))?;
    write_predictions(&out.predictions, &dir.join("predictions.csv"), &pre)?;
    let mut log = format!("# {pre}\n");
    for line in &out.imputation_log {
        log.push_str(line);
        log.push('\n');
    }
    write_text(&dir.join("imputation.log"), &log)?;
    if let Some(m) = &out.model {
        save_checkpoint(
            &Checkpoint::new(m.clone(), out.report.config_hash.clone()),
            dir.join("checkpoint.json"),
        )?;
    }
    if let Some(g) = &out.train_graph {
        write_edge_list(g.adjacency(), dir.join("edges_train.csv"), floor, Some(&pre))?;
    }
    if let Some(g) = &out.test_graph {
        write_edge_list(g.adjacency(), dir.join("edges_test.csv"), floor, Some(&pre))?;
    }
    if let Some(g) = &out.analysis_graph {
        write_edge_list(g, dir.join("analysis_edges.csv"), floor, Some(&pre))?;
    }
    Ok(dir)
}

/// impute, split, standardize, oversample, build graphs, fit, evaluate, and
/// write every artifact.
pub fn cmd_run(cfg: &PipelineConfig) -> Result<RunReport> {
    let cfg = cfg.resolved()?;
    let cohort = load_or_generate(&cfg)?;
    let out = execute(&cfg, &cohort, true)?;
    let dir = write_run(&cfg, &out)?;
    log::info!(
        "run: {} day {} test AUC {:.4} -> {}",
        cfg.variant,
        cfg.day,
        out.report.eval.auc,
        dir.display()
    );
    Ok(out.report)
}
