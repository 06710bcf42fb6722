use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Product-limit survival estimate evaluated at each distinct observed time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    /// `S(t)` just after each time.
    pub survival: Vec<f64>,
    pub at_risk: Vec<usize>,
    pub events: Vec<usize>,
}

impl SurvivalCurve {
    /// Step-function value at `t` (1 before the first time).
    pub fn survival_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&x| x <= t);
        if k == 0 {
            1.0
        } else {
            self.survival[k - 1]
        }
    }

    pub fn write_csv(&self, path: impl AsRef<Path>, preamble: Option<&str>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        if let Some(p) = preamble {
            out.push_str(&format!("# {p}\n"));
        }
        out.push_str("time,survival,at_risk,events\n");
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.times[i], self.survival[i], self.at_risk[i], self.events[i]
            ));
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// Kaplan-Meier estimator. `event[i]` is true for an observed event (transfer)
/// and false for censoring.
pub fn kaplan_meier(times: &[f64], event: &[bool]) -> Result<SurvivalCurve> {
    if times.is_empty() {
        return Err(Error::Analysis("kaplan_meier: empty input".into()));
    }
    if times.len() != event.len() {
        return Err(Error::Analysis(format!(
            "kaplan_meier: {} times but {} event flags",
            times.len(),
            event.len()
        )));
    }
    if let Some(t) = times.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(Error::Analysis(format!("kaplan_meier: time {t} is not positive")));
    }
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let mut curve = SurvivalCurve {
        times: Vec::new(),
        survival: Vec::new(),
        at_risk: Vec::new(),
        events: Vec::new(),
    };
    let mut s = 1.0;
    let mut remaining = times.len();
    let mut i = 0;
    while i < order.len() {
        let t = times[order[i]];
        let mut d = 0;
        let mut leaving = 0;
        while i < order.len() && times[order[i]] == t {
            d += usize::from(event[order[i]]);
            leaving += 1;
            i += 1;
        }
        s *= 1.0 - d as f64 / remaining as f64;
        curve.times.push(t);
        curve.survival.push(s);
        curve.at_risk.push(remaining);
        curve.events.push(d);
        remaining -= leaving;
    }
    Ok(curve)
}
