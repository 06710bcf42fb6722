//! ROC analysis and threshold metrics.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One operating point. `threshold = None` is the point above every score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub day: u32,
    pub model: String,
    pub n_test: usize,
    pub n_positive: usize,
    pub auc: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    /// Youden-optimal threshold chosen on validation scores.
    pub threshold: f64,
    pub roc_points: Vec<RocPoint>,
}

fn class_counts(scores: &[f64], labels: &[u8]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::Eval(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Eval("scores contain NaN".into()));
    }
    let pos = labels.iter().filter(|&&y| y == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Eval("both classes must be present".into()));
    }
    Ok((pos, neg))
}

/// Sweep thresholds over the distinct scores in descending order, predicting
/// positive when `score ≥ threshold`. Starts at (0,0) and ends at (1,1).
pub fn roc_curve(scores: &[f64], labels: &[u8]) -> Result<Vec<RocPoint>> {
    let (pos, neg) = class_counts(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: None,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
            threshold: Some(s),
        });
    }
    Ok(points)
}

/// Area under the ROC curve as the Mann-Whitney statistic with half credit
/// for ties.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let (pos, neg) = class_counts(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // sum of (1-based, tie-averaged) ranks of the positives, doubled to stay integral
    let mut twice_rank_sum: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let twice_mid = (i + 1 + j) as u64;
        let n_pos_tied = order[i..j].iter().filter(|&&k| labels[k] == 1).count() as u64;
        twice_rank_sum += twice_mid * n_pos_tied;
        i = j;
    }
    let p = pos as u64;
    let twice_u = twice_rank_sum - p * (p + 1);
    Ok(twice_u as f64 / 2.0 / (pos as f64 * neg as f64))
}

/// Trapezoidal area under a ROC polyline.
pub fn trapezoid_area(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum()
}

/// `(sensitivity, specificity)` predicting positive when `score ≥ threshold`.
/// A class with no members yields `NaN` for its rate.
pub fn sen_spe(scores: &[f64], labels: &[u8], threshold: f64) -> (f64, f64) {
    let (mut tp, mut fn_, mut tn, mut fp) = (0usize, 0usize, 0usize, 0usize);
    for (&s, &y) in scores.iter().zip(labels) {
        match (s >= threshold, y == 1) {
            (true, true) => tp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
            (true, false) => fp += 1,
        }
    }
    let rate = |a: usize, b: usize| {
        if a + b == 0 {
            f64::NAN
        } else {
            a as f64 / (a + b) as f64
        }
    };
    (rate(tp, fn_), rate(tn, fp))
}

/// Threshold maximizing Youden's J (sensitivity + specificity − 1) over the
/// distinct scores; ties keep the highest threshold.
pub fn youden_threshold(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let points = roc_curve(scores, labels)?;
    let mut best = (f64::NEG_INFINITY, f64::INFINITY);
    for p in points.iter().skip(1) {
        let j = p.tpr - p.fpr;
        if j > best.0 {
            best = (j, p.threshold.expect("swept points carry a threshold"));
        }
    }
    Ok(best.1)
}

/// Write ROC points as `fpr,tpr,threshold` CSV (`inf` for the first point).
pub fn write_roc_csv(points: &[RocPoint], path: impl AsRef<Path>, preamble: Option<&str>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    if let Some(p) = preamble {
        out.push_str(&format!("# {p}\n"));
    }
    out.push_str("fpr,tpr,threshold\n");
    for p in points {
        let t = p.threshold.map_or_else(|| "inf".to_string(), |t| t.to_string());
        out.push_str(&format!("{},{},{}\n", p.fpr, p.tpr, t));
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
