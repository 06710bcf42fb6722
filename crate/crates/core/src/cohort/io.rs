//! `patients.csv` / `vitals.csv` ingestion and export.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::{Cohort, Comorbidity, Gender, Outcome, PatientRecord, VitalsSample, N_FEATURES};
use crate::error::{Error, Result};

pub const PATIENTS_HEADER: [&str; 9] = [
    "id",
    "age",
    "gender",
    "diabetes",
    "cardiovascular",
    "obesity",
    "copd",
    "outcome",
    "outcome_day",
];

pub const VITALS_HEADER: [&str; 7] = ["id", "day", "bt", "pr", "spo2", "sbp", "dbp"];

struct PatientRow {
    age: u32,
    gender: Gender,
    comorbidities: BTreeSet<Comorbidity>,
    outcome: Outcome,
}

fn open(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn check_header(rdr: &mut csv::Reader<File>, path: &Path, expected: &[&str]) -> Result<()> {
    let header = rdr.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::CohortRow {
            path: path.to_path_buf(),
            row: 1,
            msg: format!(
                "header {:?} does not match expected {:?}",
                header.iter().collect::<Vec<_>>(),
                expected
            ),
        });
    }
    Ok(())
}

fn row_err(path: &Path, rec: &csv::StringRecord, msg: impl Into<String>) -> Error {
    Error::CohortRow {
        path: path.to_path_buf(),
        row: rec.position().map_or(0, |p| p.line() as usize),
        msg: msg.into(),
    }
}

fn parse_flag(path: &Path, rec: &csv::StringRecord, field: &str, col: usize) -> Result<bool> {
    match &rec[col] {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(row_err(path, rec, format!("{field} must be 0 or 1, got {other:?}"))),
    }
}

fn read_patients(path: &Path) -> Result<BTreeMap<String, (usize, PatientRow)>> {
    let mut rdr = open(path)?;
    check_header(&mut rdr, path, &PATIENTS_HEADER)?;
    let mut out = BTreeMap::new();
    for (order, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let id = rec[0].to_string();
        if id.is_empty() {
            return Err(row_err(path, &rec, "empty id"));
        }
        let age: u32 = rec[1]
            .parse()
            .map_err(|_| row_err(path, &rec, format!("invalid age {:?}", &rec[1])))?;
        let gender = match &rec[2] {
            "F" => Gender::Female,
            "M" => Gender::Male,
            g => return Err(row_err(path, &rec, format!("gender must be F or M, got {g:?}"))),
        };
        let mut comorbidities = BTreeSet::new();
        for (i, c) in Comorbidity::ALL.iter().enumerate() {
            if parse_flag(path, &rec, c.name(), 3 + i)? {
                comorbidities.insert(*c);
            }
        }
        let day = &rec[8];
        let parse_day = || -> Result<u32> {
            match day.parse::<u32>() {
                Ok(d) if d >= 1 => Ok(d),
                _ => Err(row_err(path, &rec, format!("invalid outcome_day {day:?}"))),
            }
        };
        let outcome = match &rec[7] {
            "transferred" => Outcome::Transferred(parse_day()?),
            "discharged" => Outcome::Discharged(parse_day()?),
            "present" if day.is_empty() => Outcome::Present,
            "present" => return Err(row_err(path, &rec, "present patients have no outcome_day")),
            o => return Err(row_err(path, &rec, format!("unknown outcome {o:?}"))),
        };
        let row = PatientRow {
            age,
            gender,
            comorbidities,
            outcome,
        };
        if out.insert(id.clone(), (order, row)).is_some() {
            return Err(row_err(path, &rec, format!("duplicate patient id {id}")));
        }
    }
    Ok(out)
}

fn read_vitals(path: &Path) -> Result<BTreeMap<String, BTreeMap<u32, VitalsSample>>> {
    let mut rdr = open(path)?;
    check_header(&mut rdr, path, &VITALS_HEADER)?;
    let mut out: BTreeMap<String, BTreeMap<u32, VitalsSample>> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let id = rec[0].to_string();
        let day: u32 = match rec[1].parse() {
            Ok(d) if d >= 1 => d,
            _ => return Err(row_err(path, &rec, format!("invalid day {:?}", &rec[1]))),
        };
        let mut values = [None; N_FEATURES];
        for (f, slot) in values.iter_mut().enumerate() {
            let raw = &rec[2 + f];
            if !raw.is_empty() {
                let v: f64 = raw.parse().map_err(|_| {
                    row_err(path, &rec, format!("{}: invalid number {raw:?}", VITALS_HEADER[2 + f]))
                })?;
                *slot = Some(v);
            }
        }
        let sample = VitalsSample::from_array(values);
        if let Some((name, v)) = sample.out_of_bounds() {
            return Err(row_err(path, &rec, format!("{name} = {v} out of bounds")));
        }
        if out.entry(id.clone()).or_default().insert(day, sample).is_some() {
            return Err(row_err(
                path,
                &rec,
                format!("duplicate row for id {id}, day {day}"),
            ));
        }
    }
    Ok(out)
}

/// Read a cohort from the two-file CSV layout.
pub fn load_cohort(vitals_csv: impl AsRef<Path>, patients_csv: impl AsRef<Path>) -> Result<Cohort> {
    let vitals_path = vitals_csv.as_ref();
    let patients_path = patients_csv.as_ref();
    let patients = read_patients(patients_path)?;
    let mut vitals = read_vitals(vitals_path)?;

    if let Some(id) = vitals.keys().find(|id| !patients.contains_key(*id)) {
        return Err(Error::Cohort(format!(
            "{}: vitals for unknown patient id {id}",
            vitals_path.display()
        )));
    }

    let mut ordered: Vec<(usize, String, PatientRow)> = patients
        .into_iter()
        .map(|(id, (order, row))| (order, id, row))
        .collect();
    ordered.sort_by_key(|(order, _, _)| *order);

    let mut records = Vec::with_capacity(ordered.len());
    for (_, id, row) in ordered {
        let days = vitals.remove(&id).unwrap_or_default();
        if days.is_empty() {
            return Err(Error::Cohort(format!("patient {id}: no vitals rows")));
        }
        for (expected, &day) in (1u32..).zip(days.keys()) {
            if day != expected {
                return Err(Error::Cohort(format!(
                    "patient {id}: non-contiguous day indices (expected day {expected}, found {day})"
                )));
            }
        }
        records.push(PatientRecord::new(
            id,
            row.age,
            row.gender,
            row.comorbidities,
            days.into_values().collect(),
            row.outcome,
        )?);
    }
    Cohort::new(records)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write `patients.csv` and `vitals.csv` into `dir`. When `preamble` is given
/// it is written as a leading `#` comment line in both files.
pub fn write_cohort(cohort: &Cohort, dir: impl AsRef<Path>, preamble: Option<&str>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let write = |name: &str, body: String| -> Result<()> {
        let path = dir.join(name);
        let mut f = File::create(&path).map_err(|e| Error::io(&path, e))?;
        if let Some(p) = preamble {
            writeln!(f, "# {p}").map_err(|e| Error::io(&path, e))?;
        }
        f.write_all(body.as_bytes()).map_err(|e| Error::io(&path, e))
    };

    let mut patients = PATIENTS_HEADER.join(",");
    patients.push('\n');
    let mut vitals = VITALS_HEADER.join(",");
    vitals.push('\n');
    for p in &cohort.patients {
        let flags: Vec<&str> = Comorbidity::ALL
            .iter()
            .map(|c| if p.comorbidities.contains(c) { "1" } else { "0" })
            .collect();
        let (outcome, day) = match p.outcome {
            Outcome::Transferred(d) => ("transferred", d.to_string()),
            Outcome::Discharged(d) => ("discharged", d.to_string()),
            Outcome::Present => ("present", String::new()),
        };
        let gender = match p.gender {
            Gender::Female => "F",
            Gender::Male => "M",
        };
        patients.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.id,
            p.age,
            gender,
            flags.join(","),
            outcome,
            day
        ));
        for (d, s) in p.vitals.iter().enumerate() {
            let vals: Vec<String> = s.to_array().iter().map(|v| fmt_opt(*v)).collect();
            vitals.push_str(&format!("{},{},{}\n", p.id, d + 1, vals.join(",")));
        }
    }
    write("patients.csv", patients)?;
    write("vitals.csv", vitals)
}
