use std::fmt::Write as _;
use std::path::Path;

use super::config::{PipelineConfig, Variant};
use super::run::RunReport;
use super::write_text;
use crate::error::{Error, Result};

/// Every `report.json` under `out/<variant>/day<T>/`, ordered by variant and
/// day.
pub fn collect_reports(out: &Path) -> Result<Vec<RunReport>> {
    let mut reports = Vec::new();
    for v in Variant::ALL {
        let vdir = out.join(v.name());
        let Ok(entries) = std::fs::read_dir(&vdir) else {
            continue;
        };
        let mut days: Vec<(u32, std::path::PathBuf)> = entries
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                let d: u32 = name.strip_prefix("day")?.parse().ok()?;
                Some((d, e.path().join("report.json")))
            })
            .filter(|(_, p)| p.exists())
            .collect();
        days.sort();
        for (_, p) in days {
            let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
            reports.push(serde_json::from_str(&text)?);
        }
    }
    Ok(reports)
}

/// Per-model, per-day AUC / sensitivity / specificity table.
pub fn report_table(reports: &[RunReport]) -> String {
    let mut days: Vec<u32> = reports.iter().map(|r| r.day).collect();
    days.sort_unstable();
    days.dedup();
    let mut s = String::new();
    let _ = write!(s, "{:<20}", "model");
    for d in &days {
        let _ = write!(s, "{:>24}", format!("Day {d} AUC/SEN/SPE"));
    }
    s.push('\n');
    for v in Variant::ALL {
        let mine: Vec<&RunReport> = reports.iter().filter(|r| r.variant == v).collect();
        if mine.is_empty() {
            continue;
        }
        let _ = write!(s, "{:<20}", v.name());
        for d in &days {
            let cell = match mine.iter().find(|r| r.day == *d) {
                Some(r) => format!(
                    "{:.3}/{:.3}/{:.3}",
                    r.eval.auc, r.eval.sensitivity, r.eval.specificity
                ),
                None => "-".into(),
            };
            let _ = write!(s, "{cell:>24}");
        }
        s.push('\n');
    }
    s
}

/// Gather run reports under the output directory, write `summary.txt` there
/// and return the table.
pub fn cmd_report(cfg: &PipelineConfig) -> Result<String> {
    let reports = collect_reports(&cfg.out)?;
    if reports.is_empty() {
        return Err(Error::Config(format!(
            "no run reports under {}",
            cfg.out.display()
        )));
    }
    let table = report_table(&reports);
    write_text(&cfg.out.join("summary.txt"), &table)?;
    Ok(table)
}
