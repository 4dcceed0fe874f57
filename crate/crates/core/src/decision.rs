//! Treatment choice by minimum expected morbidity.
//!
//! Utilities are expected hospital days, so lower is better. With two
//! hypotheses the expected-morbidity difference between treatments is linear
//! in the posterior, which gives a single switching probability.

use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kb::{Morbidity, Treatment, UtilityTable};

/// Where the two treatments' expected morbidities cross for a designated
/// disease against its complement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SwitchThreshold {
    /// Operation is preferred above this posterior when it helps the
    /// designated disease, below it otherwise.
    Crossing { probability: f64 },
    /// One treatment is at least as good at every posterior in `[0, 1]`.
    Dominance { treatment: Treatment },
    /// Both treatments have identical expected morbidity everywhere.
    Indifferent,
}

impl SwitchThreshold {
    pub fn probability(&self) -> Option<f64> {
        match self {
            SwitchThreshold::Crossing { probability } => Some(*probability),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub disease: String,
    /// Morbidities used for the complement hypothesis.
    pub complement: Morbidity,
    pub threshold: SwitchThreshold,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreatmentAssessment {
    pub expected_morbidity: IndexMap<Treatment, f64>,
    pub recommended: Treatment,
    /// Expected days saved by the recommendation; always `>= 0`.
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdReport>,
}

fn morbidity<'u>(utilities: &'u UtilityTable, disease: &str) -> Result<&'u Morbidity> {
    utilities.get(disease).ok_or_else(|| Error::MissingUtility(disease.to_string()))
}

/// `Σ_D P(D) · m(D, treatment)`.
pub fn expected_morbidity(
    posteriors: &IndexMap<String, f64>,
    utilities: &UtilityTable,
    treatment: Treatment,
) -> Result<f64> {
    posteriors.iter().try_fold(0.0, |acc, (d, &p)| Ok(acc + p * morbidity(utilities, d)?.days(treatment)))
}

/// Lowest expected morbidity wins; ties go to symptomatic treatment.
pub fn recommend(posteriors: &IndexMap<String, f64>, utilities: &UtilityTable) -> Result<TreatmentAssessment> {
    let mut expected = IndexMap::new();
    for t in Treatment::ALL {
        expected.insert(t, expected_morbidity(posteriors, utilities, t)?);
    }
    // Summing per-disease differences keeps the sign exact near a crossing.
    let mut excess = 0.0;
    for (d, &p) in posteriors {
        let m = morbidity(utilities, d)?;
        excess += p * (m.symptomatic - m.operation);
    }
    let recommended = if excess > 0.0 { Treatment::Operation } else { Treatment::Symptomatic };
    Ok(TreatmentAssessment { expected_morbidity: expected, recommended, margin: excess.abs(), threshold: None })
}

/// Threshold for two hypotheses given their morbidities directly.
pub fn switch_threshold_pair(target: &Morbidity, complement: &Morbidity) -> SwitchThreshold {
    // excess(p) = p·a + (1 − p)·c is the symptomatic-minus-operation gap
    let a = target.symptomatic - target.operation;
    let c = complement.symptomatic - complement.operation;
    if a == c {
        return match a.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => SwitchThreshold::Dominance { treatment: Treatment::Operation },
            Some(std::cmp::Ordering::Less) => SwitchThreshold::Dominance { treatment: Treatment::Symptomatic },
            _ => SwitchThreshold::Indifferent,
        };
    }
    let p = c / (c - a);
    if (0.0..=1.0).contains(&p) {
        SwitchThreshold::Crossing { probability: p }
    } else if a + c > 0.0 {
        SwitchThreshold::Dominance { treatment: Treatment::Operation }
    } else {
        SwitchThreshold::Dominance { treatment: Treatment::Symptomatic }
    }
}

/// Threshold for `disease_id` against a complement hypothesis with the given
/// morbidities.
pub fn switch_threshold(utilities: &UtilityTable, disease_id: &str, complement: &Morbidity) -> Result<SwitchThreshold> {
    Ok(switch_threshold_pair(morbidity(utilities, disease_id)?, complement))
}

/// Morbidities of "not `disease_id`": the posterior-weighted mean over the
/// other diseases, or their plain mean when they carry no posterior mass.
pub fn complement_morbidity(
    posteriors: &IndexMap<String, f64>,
    utilities: &UtilityTable,
    disease_id: &str,
) -> Result<Morbidity> {
    let others: Vec<(&str, f64)> =
        posteriors.iter().filter(|(d, _)| d.as_str() != disease_id).map(|(d, &p)| (d.as_str(), p)).collect();
    if others.is_empty() {
        return Err(Error::InsufficientData { needed: 2, got: 1 });
    }
    let mass: f64 = others.iter().map(|o| o.1).sum();
    let weight = |p: f64| if mass > 0.0 { p / mass } else { 1.0 / others.len() as f64 };
    let mut out = Morbidity::new(0.0, 0.0);
    for &(d, p) in &others {
        let m = morbidity(utilities, d)?;
        out.symptomatic += weight(p) * m.symptomatic;
        out.operation += weight(p) * m.operation;
    }
    Ok(out)
}

/// [`recommend`] plus the switching threshold for `target`.
pub fn assess(
    posteriors: &IndexMap<String, f64>,
    utilities: &UtilityTable,
    target: &str,
) -> Result<TreatmentAssessment> {
    let mut out = recommend(posteriors, utilities)?;
    let complement = complement_morbidity(posteriors, utilities, target)?;
    out.threshold = Some(ThresholdReport {
        disease: target.to_string(),
        threshold: switch_threshold(utilities, target, &complement)?,
        complement,
    });
    Ok(out)
}
