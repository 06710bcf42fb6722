//! Cohort data model, daily risk sets and synthetic cohort generation.
//!
//! Patients are aligned at their arrival day: day indices are 1-based and a
//! patient who leaves (transfer or discharge) on day `d` contributes vitals for
//! days `1..=d` only.

mod io;
mod synth;

pub use io::{load_cohort, write_cohort};
pub use synth::{generate_synthetic_cohort, GenConfig, GroupStats, MeanSd, MissingRates, VitalStats};

use std::collections::{BTreeSet, HashMap, HashSet};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vital-sign feature names in column order.
pub const FEATURE_NAMES: [&str; 5] = ["bt", "pr", "spo2", "sbp", "dbp"];

/// Number of vital-sign features per day.
pub const N_FEATURES: usize = FEATURE_NAMES.len();

/// Inclusive physiologic bounds per feature, in [`FEATURE_NAMES`] order.
pub const BOUNDS: [(f64, f64); 5] = [
    (25.0, 45.0),
    (20.0, 250.0),
    (50.0, 100.0),
    (30.0, 260.0),
    (30.0, 260.0),
];

/// One day of vital signs. `None` marks a missing measurement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct VitalsSample {
    /// Body temperature, °C.
    pub bt: Option<f64>,
    /// Pulse rate, beats/min.
    pub pr: Option<f64>,
    /// Peripheral oxygen saturation, percent.
    pub spo2: Option<f64>,
    /// Systolic blood pressure, mm Hg.
    pub sbp: Option<f64>,
    /// Diastolic blood pressure, mm Hg.
    pub dbp: Option<f64>,
}

impl VitalsSample {
    pub fn from_array(values: [Option<f64>; N_FEATURES]) -> Self {
        let [bt, pr, spo2, sbp, dbp] = values;
        VitalsSample {
            bt,
            pr,
            spo2,
            sbp,
            dbp,
        }
    }

    pub fn to_array(&self) -> [Option<f64>; N_FEATURES] {
        [self.bt, self.pr, self.spo2, self.sbp, self.dbp]
    }

    /// Name of the first present value outside [`BOUNDS`], if any.
    pub fn out_of_bounds(&self) -> Option<(&'static str, f64)> {
        self.to_array()
            .iter()
            .zip(BOUNDS.iter())
            .zip(FEATURE_NAMES.iter())
            .find_map(|((v, &(lo, hi)), &name)| match v {
                Some(x) if !(lo..=hi).contains(x) => Some((name, *x)),
                _ => None,
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gender {
    Female,
    Male,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Comorbidity {
    Diabetes,
    Cardiovascular,
    Obesity,
    Copd,
}

impl Comorbidity {
    pub const ALL: [Comorbidity; 4] = [
        Comorbidity::Diabetes,
        Comorbidity::Cardiovascular,
        Comorbidity::Obesity,
        Comorbidity::Copd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Comorbidity::Diabetes => "diabetes",
            Comorbidity::Cardiovascular => "cardiovascular",
            Comorbidity::Obesity => "obesity",
            Comorbidity::Copd => "copd",
        }
    }
}

/// How a stay ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    /// Transferred to a hospital on the given day.
    Transferred(u32),
    /// Discharged on the given day.
    Discharged(u32),
    /// Still at the facility at the end of follow-up.
    Present,
}

impl Outcome {
    /// Day the patient left, if they left.
    pub fn day(self) -> Option<u32> {
        match self {
            Outcome::Transferred(d) | Outcome::Discharged(d) => Some(d),
            Outcome::Present => None,
        }
    }

    pub fn is_transfer(self) -> bool {
        matches!(self, Outcome::Transferred(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatientRecord {
    pub id: String,
    pub age: u32,
    pub gender: Gender,
    pub comorbidities: BTreeSet<Comorbidity>,
    /// `vitals[d - 1]` holds day `d`.
    pub vitals: Vec<VitalsSample>,
    pub outcome: Outcome,
}

impl PatientRecord {
    /// Build a record, checking the day-coverage invariants.
    pub fn new(
        id: impl Into<String>,
        age: u32,
        gender: Gender,
        comorbidities: BTreeSet<Comorbidity>,
        vitals: Vec<VitalsSample>,
        outcome: Outcome,
    ) -> Result<Self> {
        let rec = PatientRecord {
            id: id.into(),
            age,
            gender,
            comorbidities,
            vitals,
            outcome,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vitals.is_empty() {
            return Err(Error::Cohort(format!("patient {}: no vitals", self.id)));
        }
        if let Some(d) = self.outcome.day() {
            if d as usize != self.vitals.len() {
                return Err(Error::Cohort(format!(
                    "patient {}: outcome day {} but vitals cover days 1..{}",
                    self.id,
                    d,
                    self.vitals.len()
                )));
            }
        }
        for (i, v) in self.vitals.iter().enumerate() {
            if let Some((name, x)) = v.out_of_bounds() {
                return Err(Error::Cohort(format!(
                    "patient {}: day {}: {} = {} out of bounds",
                    self.id,
                    i + 1,
                    name,
                    x
                )));
            }
        }
        Ok(())
    }

    /// Last day with vitals.
    pub fn last_day(&self) -> u32 {
        self.vitals.len() as u32
    }

    /// Length of stay in days (outcome day, or last observed day if present).
    pub fn length_of_stay(&self) -> u32 {
        self.outcome.day().unwrap_or_else(|| self.last_day())
    }

    /// Whether the patient is at the facility at the start of `day`.
    pub fn present_on(&self, day: u32) -> bool {
        day >= 1 && day <= self.last_day()
    }

    /// Daily label: positive iff transferred exactly on `day`.
    pub fn label_on(&self, day: u32) -> u8 {
        u8::from(self.outcome == Outcome::Transferred(day))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    pub patients: Vec<PatientRecord>,
    pub feature_names: Vec<String>,
}

impl Cohort {
    pub fn new(patients: Vec<PatientRecord>) -> Result<Self> {
        let mut seen = HashSet::new();
        for p in &patients {
            if !seen.insert(p.id.as_str()) {
                return Err(Error::Cohort(format!("duplicate patient id {}", p.id)));
            }
            p.validate()?;
        }
        Ok(Cohort {
            patients,
            feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.patients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patients.is_empty()
    }

    pub fn max_day(&self) -> u32 {
        self.patients.iter().map(|p| p.last_day()).max().unwrap_or(0)
    }

    pub fn get(&self, id: &str) -> Option<&PatientRecord> {
        self.patients.iter().find(|p| p.id == id)
    }

    /// Patients present at the start of `day`, in cohort order.
    pub fn present_on(&self, day: u32) -> Vec<&PatientRecord> {
        self.patients.iter().filter(|p| p.present_on(day)).collect()
    }

    /// Raw (unimputed) stacked features for `ids` over days `1..=days`.
    ///
    /// Row `i` holds `ids[i]`; columns are day-major (`day 1 features`,
    /// `day 2 features`, ...). Missing measurements, including days after a
    /// patient left, are `NaN`.
    pub fn raw_stack(&self, ids: &[String], days: u32) -> Result<Array2<f64>> {
        let index: HashMap<&str, &PatientRecord> =
            self.patients.iter().map(|p| (p.id.as_str(), p)).collect();
        let mut out = Array2::from_elem((ids.len(), N_FEATURES * days as usize), f64::NAN);
        for (row, id) in ids.iter().enumerate() {
            let p = index
                .get(id.as_str())
                .ok_or_else(|| Error::Cohort(format!("unknown patient id {id}")))?;
            for (d, sample) in p.vitals.iter().take(days as usize).enumerate() {
                for (f, v) in sample.to_array().iter().enumerate() {
                    if let Some(x) = v {
                        out[[row, d * N_FEATURES + f]] = *x;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Complete (imputed) per-day feature matrices.
///
/// `days[t - 1]` holds the day-`t` matrix; each has one row per id in `ids`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImputedVitals {
    pub ids: Vec<String>,
    pub days: Vec<Array2<f64>>,
}

impl ImputedVitals {
    /// Split a complete day-major stack (as produced by [`Cohort::raw_stack`]
    /// followed by imputation) into per-day matrices.
    pub fn from_stack(ids: Vec<String>, stack: &Array2<f64>) -> Result<Self> {
        if stack.nrows() != ids.len() || stack.ncols() % N_FEATURES != 0 {
            return Err(Error::Cohort(format!(
                "stack shape {:?} does not match {} ids × k·{} features",
                stack.dim(),
                ids.len(),
                N_FEATURES
            )));
        }
        if stack.iter().any(|v| !v.is_finite()) {
            return Err(Error::Cohort("stack contains missing values".into()));
        }
        let n_days = stack.ncols() / N_FEATURES;
        let days = (0..n_days)
            .map(|d| {
                stack
                    .slice(ndarray::s![.., d * N_FEATURES..(d + 1) * N_FEATURES])
                    .to_owned()
            })
            .collect();
        Ok(ImputedVitals { ids, days })
    }
}

/// The prediction population of day `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskSet {
    pub day: u32,
    pub ids: Vec<String>,
    /// `n × (p·T)`, day-major.
    pub features: Array2<f64>,
    /// 1 iff transferred on `day`.
    pub labels: Vec<u8>,
}

impl RiskSet {
    pub fn n_positive(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }
}

/// Ids of patients present at the start of `day`, in cohort order.
pub fn risk_ids(cohort: &Cohort, day: u32) -> Vec<String> {
    cohort
        .present_on(day)
        .into_iter()
        .map(|p| p.id.clone())
        .collect()
}

/// Extract the day-`day` risk set with imputed features for days `1..=day`.
pub fn risk_set(cohort: &Cohort, day: u32, imputed: &ImputedVitals) -> Result<RiskSet> {
    if day == 0 {
        return Err(Error::Cohort("day must be ≥ 1".into()));
    }
    if day > cohort.max_day() {
        return Err(Error::Cohort(format!(
            "day {day} exceeds maximum observed day {}",
            cohort.max_day()
        )));
    }
    if imputed.days.len() < day as usize {
        return Err(Error::Cohort(format!(
            "imputed features cover {} days, need {day}",
            imputed.days.len()
        )));
    }
    let row_of: HashMap<&str, usize> = imputed
        .ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let members = cohort.present_on(day);
    let mut features = Array2::zeros((members.len(), N_FEATURES * day as usize));
    let mut ids = Vec::with_capacity(members.len());
    let mut labels = Vec::with_capacity(members.len());
    for (i, p) in members.iter().enumerate() {
        let r = *row_of
            .get(p.id.as_str())
            .ok_or_else(|| Error::Cohort(format!("no imputed features for {}", p.id)))?;
        for t in 0..day as usize {
            for f in 0..N_FEATURES {
                features[[i, t * N_FEATURES + f]] = imputed.days[t][[r, f]];
            }
        }
        ids.push(p.id.clone());
        labels.push(p.label_on(day));
    }
    Ok(RiskSet {
        day,
        ids,
        features,
        labels,
    })
}
