use std::fmt::Write as _;

use super::config::PipelineConfig;
use super::{load_or_generate, preamble};
use crate::cohort::{write_cohort, Cohort, Comorbidity, Gender, PatientRecord, FEATURE_NAMES, N_FEATURES};
use crate::error::{Error, Result};

fn mean_sd(v: &[f64]) -> String {
    if v.is_empty() {
        return "-".into();
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    if v.len() < 2 {
        return format!("{m:.2}");
    }
    let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt();
    format!("{m:.2} ({sd:.2})")
}

fn count_pct(k: usize, n: usize) -> String {
    if n == 0 {
        return "-".into();
    }
    format!("{k} ({:.1}%)", 100.0 * k as f64 / n as f64)
}

/// Summary of a cohort by outcome group: age, sex, comorbidities, first-three
/// day vital averages and per-vital missing rates.
pub fn cohort_summary_table(cohort: &Cohort) -> String {
    let groups: [(&str, Vec<&PatientRecord>); 3] = [
        (
            "Transferred",
            cohort.patients.iter().filter(|p| p.outcome.is_transfer()).collect(),
        ),
        (
            "Not transferred",
            cohort.patients.iter().filter(|p| !p.outcome.is_transfer()).collect(),
        ),
        ("All", cohort.patients.iter().collect()),
    ];
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    rows.push(("N".into(), groups.iter().map(|(_, g)| g.len().to_string()).collect()));
    rows.push((
        "Age".into(),
        groups
            .iter()
            .map(|(_, g)| mean_sd(&g.iter().map(|p| p.age as f64).collect::<Vec<_>>()))
            .collect(),
    ));
    rows.push((
        "Female".into(),
        groups
            .iter()
            .map(|(_, g)| count_pct(g.iter().filter(|p| p.gender == Gender::Female).count(), g.len()))
            .collect(),
    ));
    for c in Comorbidity::ALL {
        rows.push((
            c.name().to_string(),
            groups
                .iter()
                .map(|(_, g)| count_pct(g.iter().filter(|p| p.comorbidities.contains(&c)).count(), g.len()))
                .collect(),
        ));
    }
    for (j, name) in FEATURE_NAMES.iter().enumerate() {
        rows.push((
            format!("{name} (days 1-3)"),
            groups
                .iter()
                .map(|(_, g)| {
                    let v: Vec<f64> = g
                        .iter()
                        .filter_map(|p| {
                            let obs: Vec<f64> =
                                p.vitals.iter().take(3).filter_map(|s| s.to_array()[j]).collect();
                            (!obs.is_empty()).then(|| obs.iter().sum::<f64>() / obs.len() as f64)
                        })
                        .collect();
                    mean_sd(&v)
                })
                .collect(),
        ));
    }
    for (j, name) in FEATURE_NAMES.iter().enumerate() {
        rows.push((
            format!("{name} missing"),
            groups
                .iter()
                .map(|(_, g)| {
                    let total: usize = g.iter().map(|p| p.vitals.len()).sum();
                    let miss: usize = g
                        .iter()
                        .flat_map(|p| p.vitals.iter())
                        .filter(|s| s.to_array()[j].is_none())
                        .count();
                    count_pct(miss, total)
                })
                .collect(),
        ));
    }
    rows.push((
        "Length of stay".into(),
        groups
            .iter()
            .map(|(_, g)| mean_sd(&g.iter().map(|p| p.length_of_stay() as f64).collect::<Vec<_>>()))
            .collect(),
    ));
    debug_assert_eq!(FEATURE_NAMES.len(), N_FEATURES);

    let mut s = String::new();
    let _ = writeln!(s, "{:<22}{:>20}{:>20}{:>20}", "", groups[0].0, groups[1].0, groups[2].0);
    for (name, cells) in rows {
        let _ = writeln!(s, "{:<22}{:>20}{:>20}{:>20}", name, cells[0], cells[1], cells[2]);
    }
    s
}

/// Write `patients.csv` and `vitals.csv` for the configured generator into
/// the output directory and return the summary table.
pub fn cmd_generate(cfg: &PipelineConfig) -> Result<String> {
    if cfg.input.is_some() {
        return Err(Error::Config("generate needs a [generate] section, not [input]".into()));
    }
    let cfg = cfg.resolved()?;
    let cohort = load_or_generate(&cfg)?;
    let hash = cfg.hash()?;
    write_cohort(&cohort, &cfg.out, Some(&preamble(&hash)))?;
    Ok(cohort_summary_table(&cohort))
}
