//! Synthetic cohort generator.
//!
//! Defaults reproduce the cohort-level summary statistics of a 632-patient
//! medicalized-hotel population: group means and standard deviations of age
//! and first-three-day vitals, daily missing rates, comorbidity and gender
//! prevalences, and length-of-stay profiles.
//!
//! Daily vitals are the group mean plus a stationary AR(1) noise process per
//! patient. Severe patients additionally drift linearly across their stay,
//! centred on the severe-group mean, so that the day of transfer is the most
//! abnormal day.

use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{
    Cohort, Comorbidity, Gender, Outcome, PatientRecord, VitalsSample, BOUNDS, N_FEATURES,
};
use crate::error::{Error, Result};
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

const fn ms(mean: f64, sd: f64) -> MeanSd {
    MeanSd { mean, sd }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VitalStats {
    pub bt: MeanSd,
    pub pr: MeanSd,
    pub spo2: MeanSd,
    pub sbp: MeanSd,
    pub dbp: MeanSd,
}

impl VitalStats {
    fn as_array(&self) -> [MeanSd; N_FEATURES] {
        [self.bt, self.pr, self.spo2, self.sbp, self.dbp]
    }
}

/// Per-group generation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub age: MeanSd,
    pub vitals: VitalStats,
    pub female_fraction: f64,
    pub diabetes: f64,
    pub cardiovascular: f64,
    pub obesity: f64,
    pub copd: f64,
}

impl GroupStats {
    fn prevalence(&self, c: Comorbidity) -> f64 {
        match c {
            Comorbidity::Diabetes => self.diabetes,
            Comorbidity::Cardiovascular => self.cardiovascular,
            Comorbidity::Obesity => self.obesity,
            Comorbidity::Copd => self.copd,
        }
    }
}

/// Per-feature probability that a daily measurement is missing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissingRates {
    pub bt: f64,
    pub pr: f64,
    pub spo2: f64,
    pub sbp: f64,
    pub dbp: f64,
}

impl MissingRates {
    pub fn as_array(&self) -> [f64; N_FEATURES] {
        [self.bt, self.pr, self.spo2, self.sbp, self.dbp]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub n_patients: usize,
    pub severe_fraction: f64,
    pub non_severe: GroupStats,
    pub severe: GroupStats,
    pub missing: MissingRates,
    pub max_stay_days: u32,
    /// Length of stay of non-severe (discharged) patients.
    pub discharge_day: MeanSd,
    /// Probability of transfer on day 1, 2, ... for severe patients
    /// (normalized internally).
    pub transfer_day_probs: Vec<f64>,
    /// AR(1) coefficient of the daily noise process.
    pub ar_coefficient: f64,
    /// Total drift of severe patients across their stay, as a fraction of the
    /// severe/non-severe mean difference.
    pub severe_drift: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_patients: 632,
            severe_fraction: 74.0 / 632.0,
            non_severe: GroupStats {
                age: ms(40.0, 19.0),
                vitals: VitalStats {
                    bt: ms(36.0, 0.63),
                    pr: ms(88.0, 11.0),
                    spo2: ms(96.0, 1.11),
                    sbp: ms(126.0, 14.0),
                    dbp: ms(85.0, 16.0),
                },
                female_fraction: 273.0 / 558.0,
                diabetes: 26.0 / 558.0,
                cardiovascular: 14.0 / 558.0,
                obesity: 19.0 / 558.0,
                copd: 48.0 / 558.0,
            },
            severe: GroupStats {
                age: ms(51.0, 20.0),
                vitals: VitalStats {
                    bt: ms(37.0, 0.50),
                    pr: ms(93.0, 11.0),
                    spo2: ms(95.0, 1.91),
                    sbp: ms(127.0, 13.0),
                    dbp: ms(81.0, 10.0),
                },
                female_fraction: 34.0 / 74.0,
                diabetes: 11.0 / 74.0,
                cardiovascular: 5.0 / 74.0,
                obesity: 4.0 / 74.0,
                copd: 8.0 / 74.0,
            },
            missing: MissingRates {
                bt: 0.0548,
                pr: 0.0698,
                spo2: 0.0493,
                sbp: 0.8142,
                dbp: 0.8144,
            },
            max_stay_days: 14,
            discharge_day: ms(9.0, 3.0),
            transfer_day_probs: vec![0.30, 0.25, 0.20, 0.15, 0.05, 0.03, 0.02],
            ar_coefficient: 0.5,
            severe_drift: 0.5,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: GenConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("GenConfig serializes to TOML")
    }

    /// Number of severe patients implied by `severe_fraction`.
    pub fn n_severe(&self) -> usize {
        (self.severe_fraction * self.n_patients as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("generator: {m}")));
        if !(self.severe_fraction > 0.0 && self.severe_fraction < 1.0) {
            return bad(format!("severe_fraction must lie in (0,1), got {}", self.severe_fraction));
        }
        if self.severe_fraction * (self.n_patients as f64) < 1.0 {
            return bad(format!(
                "severe_fraction·n_patients = {} < 1",
                self.severe_fraction * self.n_patients as f64
            ));
        }
        if self.n_severe() >= self.n_patients {
            return bad("no non-severe patients".into());
        }
        for g in [&self.non_severe, &self.severe] {
            let vitals = g.vitals.as_array();
            if vitals.iter().map(|m| m.sd).chain([g.age.sd]).any(|sd| !(sd > 0.0)) {
                return bad("standard deviations must be > 0".into());
            }
            let probs = [g.female_fraction, g.diabetes, g.cardiovascular, g.obesity, g.copd];
            if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return bad("prevalences must lie in [0,1]".into());
            }
        }
        if !(self.discharge_day.sd > 0.0) {
            return bad("discharge_day.sd must be > 0".into());
        }
        if self.missing.as_array().iter().any(|r| !(0.0..1.0).contains(r)) {
            return bad("missing rates must lie in [0,1)".into());
        }
        if self.max_stay_days == 0 {
            return bad("max_stay_days must be ≥ 1".into());
        }
        if self.transfer_day_probs.is_empty()
            || self.transfer_day_probs.iter().any(|p| !(*p >= 0.0))
            || self.transfer_day_probs.iter().sum::<f64>() <= 0.0
        {
            return bad("transfer_day_probs must be non-negative with positive sum".into());
        }
        if !(0.0..1.0).contains(&self.ar_coefficient.abs()) {
            return bad("ar_coefficient must satisfy |φ| < 1".into());
        }
        Ok(())
    }
}

fn draw_categorical<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, p) in probs.iter().enumerate() {
        if u < *p {
            return i;
        }
        u -= p;
    }
    probs.len() - 1
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (x * s).round() / s
}

/// Generate a fully resolved synthetic cohort (every patient is either
/// transferred or discharged). Bit-identical for a fixed config.
pub fn generate_synthetic_cohort(cfg: &GenConfig) -> Result<Cohort> {
    cfg.validate()?;
    let mut rng = seeds::rng(seeds::derive(cfg.seed, "cohort"));
    let n_severe = cfg.n_severe();
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let phi = cfg.ar_coefficient;
    let innovation_scale = (1.0 - phi * phi).sqrt();
    let missing = cfg.missing.as_array();
    let max_stay = cfg.max_stay_days;

    // severe flags interleaved deterministically through a shuffle
    let mut severe_flags: Vec<bool> = (0..cfg.n_patients).map(|i| i < n_severe).collect();
    rand::seq::SliceRandom::shuffle(severe_flags.as_mut_slice(), &mut rng);

    let width = cfg.n_patients.to_string().len().max(3);
    let mut patients = Vec::with_capacity(cfg.n_patients);
    for (i, &severe) in severe_flags.iter().enumerate() {
        let group = if severe { &cfg.severe } else { &cfg.non_severe };

        let age = (group.age.mean + group.age.sd * std_normal.sample(&mut rng))
            .round()
            .clamp(18.0, 100.0) as u32;
        let gender = if rng.random::<f64>() < group.female_fraction {
            Gender::Female
        } else {
            Gender::Male
        };
        let comorbidities: BTreeSet<Comorbidity> = Comorbidity::ALL
            .iter()
            .copied()
            .filter(|c| rng.random::<f64>() < group.prevalence(*c))
            .collect();

        let outcome = if severe {
            let d = draw_categorical(&mut rng, &cfg.transfer_day_probs) as u32 + 1;
            Outcome::Transferred(d.min(max_stay))
        } else {
            let d = (cfg.discharge_day.mean + cfg.discharge_day.sd * std_normal.sample(&mut rng))
                .round()
                .clamp(1.0, max_stay as f64) as u32;
            Outcome::Discharged(d)
        };
        let stay = outcome.day().expect("resolved outcome");

        let base = group.vitals.as_array();
        let ns = cfg.non_severe.vitals.as_array();
        let mut noise = [0.0; N_FEATURES];
        let mut vitals = Vec::with_capacity(stay as usize);
        for day in 1..=stay {
            // position within stay in [-0.5, 0.5]; the last day (transfer day for
            // severe patients) is always the peak, including single-day stays
            let pos = if stay > 1 {
                (day - 1) as f64 / (stay - 1) as f64 - 0.5
            } else {
                0.5
            };
            let mut values = [None; N_FEATURES];
            for f in 0..N_FEATURES {
                let z = std_normal.sample(&mut rng);
                noise[f] = if day == 1 {
                    z
                } else {
                    phi * noise[f] + innovation_scale * z
                };
                let mut mean = base[f].mean;
                if severe {
                    mean += cfg.severe_drift * (base[f].mean - ns[f].mean) * pos;
                }
                let (lo, hi) = BOUNDS[f];
                let decimals = if f == 0 { 1 } else { 0 };
                let v = round_to(mean + base[f].sd * noise[f], decimals).clamp(lo, hi);
                if rng.random::<f64>() >= missing[f] {
                    values[f] = Some(v);
                } else if f == N_FEATURES - 1 && values.iter().all(Option::is_none) {
                    // keep at least one observed value per day
                    values[f] = Some(v);
                }
            }
            vitals.push(VitalsSample::from_array(values));
        }

        patients.push(PatientRecord::new(
            format!("P{:0width$}", i + 1),
            age,
            gender,
            comorbidities,
            vitals,
            outcome,
        )?);
    }
    Cohort::new(patients)
}
