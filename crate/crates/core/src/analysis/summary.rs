use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ranksum::rank_sum;
use super::survival::{kaplan_meier, SurvivalCurve};
use crate::cohort::{Cohort, PatientRecord, FEATURE_NAMES, N_FEATURES};
use crate::error::{Error, Result};

/// Days averaged for the per-patient vital summaries.
pub const SUMMARY_DAYS: usize = 3;

/// Count, mean and sample standard deviation of one variable in one cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStat {
    pub n: usize,
    pub mean: Option<f64>,
    /// Absent when `n < 2`.
    pub sd: Option<f64>,
}

impl GroupStat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let mean = (n > 0).then(|| values.iter().sum::<f64>() / n as f64);
        let sd = match mean {
            Some(m) if n > 1 => {
                let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
                Some((ss / (n - 1) as f64).sqrt())
            }
            _ => None,
        };
        GroupStat { n, mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variable: String,
    pub high_risk: GroupStat,
    pub other: GroupStat,
    /// Two-sided rank-sum p; absent when either cluster has no values.
    pub p_value: Option<f64>,
}

/// Mean of the observed values of feature `j` over the first three days.
fn early_mean(p: &PatientRecord, j: usize) -> Option<f64> {
    let vals: Vec<f64> = p
        .vitals
        .iter()
        .take(SUMMARY_DAYS)
        .filter_map(|v| v.to_array()[j])
        .collect();
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Look up every node id in the cohort, checking that the nodes cover it.
fn resolve<'a>(cohort: &'a Cohort, node_ids: &[String]) -> Result<Vec<&'a PatientRecord>> {
    let by_id: HashMap<&str, &PatientRecord> =
        cohort.patients.iter().map(|p| (p.id.as_str(), p)).collect();
    let recs = node_ids
        .iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .copied()
                .ok_or_else(|| Error::Analysis(format!("node {id} is not in the cohort")))
        })
        .collect::<Result<Vec<_>>>()?;
    if recs.len() != cohort.len() {
        return Err(Error::Analysis(format!(
            "membership covers {} nodes but the cohort has {} patients",
            recs.len(),
            cohort.len()
        )));
    }
    Ok(recs)
}

/// Per-variable statistics of the two clusters: age, first-three-day vitals,
/// LCC and length of stay.
pub fn cluster_summary(
    cohort: &Cohort,
    node_ids: &[String],
    high_risk: &[bool],
    lcc: &[f64],
) -> Result<Vec<SummaryRow>> {
    if high_risk.len() != node_ids.len() || lcc.len() != node_ids.len() {
        return Err(Error::Analysis("membership, LCC and node ids differ in length".into()));
    }
    let recs = resolve(cohort, node_ids)?;

    let mut variables: Vec<(String, Vec<Option<f64>>)> = Vec::new();
    variables.push(("age".into(), recs.iter().map(|p| Some(p.age as f64)).collect()));
    for j in 0..N_FEATURES {
        variables.push((
            FEATURE_NAMES[j].to_string(),
            recs.iter().map(|p| early_mean(p, j)).collect(),
        ));
    }
    variables.push(("lcc".into(), lcc.iter().map(|&c| Some(c)).collect()));
    variables.push((
        "length_of_stay".into(),
        recs.iter().map(|p| Some(p.length_of_stay() as f64)).collect(),
    ));

    Ok(variables
        .into_iter()
        .map(|(variable, vals)| summary_row(variable, &vals, high_risk))
        .collect())
}

/// Statistics of one variable in both clusters; `None` values are skipped.
pub fn summary_row(variable: impl Into<String>, values: &[Option<f64>], high_risk: &[bool]) -> SummaryRow {
    let mut hi = Vec::new();
    let mut lo = Vec::new();
    for (v, &h) in values.iter().zip(high_risk) {
        if let Some(v) = v {
            if h {
                hi.push(*v);
            } else {
                lo.push(*v);
            }
        }
    }
    let p_value = (!hi.is_empty() && !lo.is_empty()).then(|| rank_sum(&hi, &lo).p);
    SummaryRow {
        variable: variable.into(),
        high_risk: GroupStat::of(&hi),
        other: GroupStat::of(&lo),
        p_value,
    }
}

/// Time-to-transfer curve of the selected patients; discharge and still
/// present are censored at their last day. `None` for an empty selection.
pub fn cluster_survival(recs: &[&PatientRecord]) -> Result<Option<SurvivalCurve>> {
    if recs.is_empty() {
        return Ok(None);
    }
    let times: Vec<f64> = recs.iter().map(|p| p.length_of_stay() as f64).collect();
    let events: Vec<bool> = recs.iter().map(|p| p.outcome.is_transfer()).collect();
    kaplan_meier(&times, &events).map(Some)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub config_hash: Option<String>,
    pub weight_floor: f64,
    pub cutoff: f64,
    pub node_ids: Vec<String>,
    pub lcc: Vec<f64>,
    pub high_risk_ids: Vec<String>,
    pub induced_mean_lcc: Option<f64>,
    pub lcc_histogram: Vec<usize>,
    pub rows: Vec<SummaryRow>,
    pub km_high_risk: Option<SurvivalCurve>,
    pub km_other: Option<SurvivalCurve>,
}

impl ClusterReport {
    /// Assemble the report for a given membership.
    pub fn build(
        cohort: &Cohort,
        node_ids: &[String],
        lcc: &[f64],
        membership: &super::Membership,
        cutoff: f64,
        weight_floor: f64,
    ) -> Result<Self> {
        let rows = cluster_summary(cohort, node_ids, &membership.high_risk, lcc)?;
        let recs = resolve(cohort, node_ids)?;
        let (hi, lo): (Vec<_>, Vec<_>) = recs
            .iter()
            .zip(&membership.high_risk)
            .partition(|(_, &h)| h);
        let hi: Vec<&PatientRecord> = hi.into_iter().map(|(p, _)| *p).collect();
        let lo: Vec<&PatientRecord> = lo.into_iter().map(|(p, _)| *p).collect();
        Ok(ClusterReport {
            config_hash: None,
            weight_floor,
            cutoff,
            node_ids: node_ids.to_vec(),
            lcc: lcc.to_vec(),
            high_risk_ids: hi.iter().map(|p| p.id.clone()).collect(),
            induced_mean_lcc: membership.induced_mean_lcc,
            lcc_histogram: super::lcc_histogram(lcc, 10),
            rows,
            km_high_risk: cluster_survival(&hi)?,
            km_other: cluster_survival(&lo)?,
        })
    }

    /// Table of per-cluster statistics in plain text.
    pub fn to_text(&self) -> String {
        let n_hi = self.high_risk_ids.len();
        let n_lo = self.node_ids.len() - n_hi;
        let mut s = String::new();
        if let Some(h) = &self.config_hash {
            let _ = writeln!(s, "# config_hash={h}");
        }
        let _ = writeln!(
            s,
            "LCC cutoff {} on graph binarized at weight > {}",
            self.cutoff, self.weight_floor
        );
        match self.induced_mean_lcc {
            Some(m) => {
                let _ = writeln!(s, "high-risk cluster mean LCC (induced subgraph): {m:.4}");
            }
            None => {
                let _ = writeln!(s, "high-risk cluster is empty");
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:<16}{:>24}{:>24}{:>10}",
            "variable",
            format!("High-risk (N={n_hi})"),
            format!("Other (N={n_lo})"),
            "p"
        );
        let cell = |g: &GroupStat| match (g.mean, g.sd) {
            (Some(m), Some(sd)) => format!("{m:.2} ({sd:.2})"),
            (Some(m), None) => format!("{m:.2} (-)"),
            _ => "-".to_string(),
        };
        for r in &self.rows {
            let p = r.p_value.map_or_else(|| "-".to_string(), |p| format!("{p:.4}"));
            let _ = writeln!(
                s,
                "{:<16}{:>24}{:>24}{:>10}",
                r.variable,
                cell(&r.high_risk),
                cell(&r.other),
                p
            );
        }
        s
    }
}
