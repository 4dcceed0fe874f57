use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::case_rng;
use super::sample::{sample_case_with, CaseRecord};
use crate::curve::MAX_HOURS;
use crate::error::{Error, Result};
use crate::inference::Finding;
use crate::kb::{KnowledgeBase, PatientContext, Sex, SexRestriction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatientDistribution {
    pub age_min: f64,
    pub age_max: f64,
    /// Probability a patient is female, for diseases open to both sexes.
    pub female_fraction: f64,
}

impl Default for PatientDistribution {
    fn default() -> Self {
        Self { age_min: 10.0, age_max: 60.0, female_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub n_per_class: usize,
    pub classes: Vec<String>,
    /// Measurement times are uniform on this range of hours since onset.
    pub time_range: (f64, f64),
    pub patients: PatientDistribution,
    pub seed: u64,
}

impl DatasetConfig {
    pub fn new(classes: impl IntoIterator<Item = impl Into<String>>, n_per_class: usize, seed: u64) -> Self {
        Self {
            n_per_class,
            classes: classes.into_iter().map(Into::into).collect(),
            time_range: (0.0, MAX_HOURS),
            patients: PatientDistribution::default(),
            seed,
        }
    }
}

/// `n_per_class` cases of each class, class-major. Case `i` draws its patient,
/// its time and its world from stream `i` of the seed.
pub fn generate_dataset(kb: &KnowledgeBase, config: &DatasetConfig) -> Result<Vec<CaseRecord>> {
    if config.classes.is_empty() {
        return Err(Error::EmptyClasses);
    }
    let mut diseases = Vec::with_capacity(config.classes.len());
    for id in &config.classes {
        diseases.push(kb.disease(id).ok_or_else(|| Error::UnknownDisease(id.clone()))?);
    }
    let (t_lo, t_hi) = config.time_range;
    if !(0.0 <= t_lo && t_lo <= t_hi && t_hi <= MAX_HOURS) {
        return Err(Error::InvalidFindings(format!("time range [{t_lo}, {t_hi}] outside [0, {MAX_HOURS}]")));
    }
    let pd = &config.patients;
    let mut cases = Vec::with_capacity(config.n_per_class * diseases.len());
    let mut case_id = 0u64;
    for disease in diseases {
        for _ in 0..config.n_per_class {
            let mut rng = case_rng(config.seed, case_id);
            let female = disease.restriction == SexRestriction::FemaleOnly || rng.random::<f64>() < pd.female_fraction;
            let age = pd.age_min + rng.random::<f64>() * (pd.age_max - pd.age_min);
            let t = t_lo + rng.random::<f64>() * (t_hi - t_lo);
            let mut patient = PatientContext::new(age, if female { Sex::Female } else { Sex::Male }).with_onset(t);
            if female {
                patient.cycle_day = Some(rng.random_range(1..=28));
            }
            cases.push(sample_case_with(kb, &patient, &disease.id, &[t], config.seed, case_id, &mut rng)?);
            case_id += 1;
        }
    }
    Ok(cases)
}

/// Replace each known finding with unknown with probability `fraction`.
pub fn mask_findings(cases: &mut [CaseRecord], fraction: f64, seed: u64) {
    for case in cases {
        let mut rng = case_rng(seed, case.case_id);
        let sets = std::iter::once(&mut case.findings).chain(case.second_findings.as_mut());
        for set in sets {
            for v in set.values.values_mut() {
                if rng.random::<f64>() < fraction {
                    *v = Finding::Unknown;
                }
            }
        }
    }
}

/// Write cases as JSON lines.
pub fn write_cases<W: Write>(mut out: W, cases: &[CaseRecord]) -> std::io::Result<()> {
    for case in cases {
        serde_json::to_writer(&mut out, case)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Read JSON-lines cases. Blank lines are skipped; errors carry the line number.
pub fn read_cases<R: BufRead>(input: R) -> std::result::Result<Vec<CaseRecord>, String> {
    let mut cases = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| format!("line {}: {e}", i + 1))?;
        if line.trim().is_empty() {
            continue;
        }
        cases.push(serde_json::from_str(&line).map_err(|e| format!("line {}: {e}", i + 1))?);
    }
    Ok(cases)
}
