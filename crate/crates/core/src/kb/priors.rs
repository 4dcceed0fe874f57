use std::collections::HashMap;

use indexmap::IndexMap;

use super::{KnowledgeBase, PatientContext, Sex};
use crate::error::{Error, Result};

/// Normalized prior probabilities in knowledge-base order.
pub type Priors = IndexMap<String, f64>;

/// Raw, unnormalized prior of each disease for this patient: the age curve for
/// the patient's sex, weighted by the cycle curve when one applies.
pub fn raw_priors(kb: &KnowledgeBase, patient: &PatientContext) -> Priors {
    kb.diseases
        .iter()
        .map(|d| {
            let p = if !d.applies_to(patient.sex) {
                0.0
            } else {
                let age_p = d.prior_age.get(&patient.sex).map_or(0.0, |c| c.eval(patient.age));
                match (&d.cycle_weight, patient.sex, patient.cycle_day) {
                    (Some(w), Sex::Female, Some(day)) => age_p * w.eval(f64::from(day)),
                    _ => age_p,
                }
            };
            (d.id.clone(), p)
        })
        .collect()
}

pub fn eval_priors(kb: &KnowledgeBase, patient: &PatientContext) -> Result<Priors> {
    normalize(raw_priors(kb, patient))
}

pub(crate) fn normalize(mut priors: Priors) -> Result<Priors> {
    let total: f64 = priors.values().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegeneratePrior);
    }
    for v in priors.values_mut() {
        *v /= total;
    }
    Ok(priors)
}

/// External-cause probability of each symptom for one patient.
#[derive(Debug, Clone, Default)]
pub struct BaseRates(HashMap<String, f64>);

impl BaseRates {
    pub fn get(&self, symptom_id: &str) -> f64 {
        self.0.get(symptom_id).copied().unwrap_or(0.0)
    }

    pub fn from_map(map: HashMap<String, f64>) -> Self {
        Self(map)
    }
}

pub fn base_rates(kb: &KnowledgeBase, patient: &PatientContext) -> BaseRates {
    BaseRates(kb.symptoms.iter().map(|s| (s.id.clone(), s.base_rate_at(patient.sex, patient.age))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{AgeCurve, CycleCurve, TimeCurve};
    use crate::kb::{CausalNode, DiseaseDef, SexRestriction};

    fn disease(id: &str, prior: AgeCurve, female_only: bool) -> DiseaseDef {
        let mut prior_age = IndexMap::new();
        if !female_only {
            prior_age.insert(Sex::Male, prior.clone());
        }
        prior_age.insert(Sex::Female, prior);
        DiseaseDef {
            id: id.into(),
            label: id.into(),
            restriction: if female_only { SexRestriction::FemaleOnly } else { SexRestriction::Any },
            prior_age,
            cycle_weight: None,
            tree: CausalNode::root(id).with(TimeCurve::constant(0.5), CausalNode::symptom("s")),
            direct_likelihoods: IndexMap::new(),
        }
    }

    fn kb(diseases: Vec<DiseaseDef>) -> KnowledgeBase {
        KnowledgeBase { diseases, ..Default::default() }
    }

    #[test]
    fn female_only_disease_is_zero_for_men() {
        let kb = kb(vec![disease("a", AgeCurve::constant(0.3), false), disease("gyn", AgeCurve::constant(0.3), true)]);
        let p = eval_priors(&kb, &PatientContext::new(25.0, Sex::Male)).unwrap();
        assert_eq!(p["gyn"], 0.0);
        assert_eq!(p["a"], 1.0);
    }

    #[test]
    fn identical_flat_priors_are_uniform() {
        let kb = kb((0..4).map(|i| disease(&format!("d{i}"), AgeCurve::constant(0.2), false)).collect());
        let p = eval_priors(&kb, &PatientContext::new(40.0, Sex::Female)).unwrap();
        for v in p.values() {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn cycle_weight_multiplies_before_normalizing() {
        let mut gyn = disease("gyn", AgeCurve::constant(0.2), true);
        gyn.cycle_weight = Some(CycleCurve::new([(1.0, 0.5), (14.0, 2.0), (28.0, 0.5)]));
        let kb = kb(vec![disease("a", AgeCurve::constant(0.2), false), gyn]);
        let patient = PatientContext::new(25.0, Sex::Female).with_cycle_day(14);
        let p = eval_priors(&kb, &patient).unwrap();
        // raw: a = 0.2, gyn = 0.2 * 2.0
        assert!((p["a"] - 0.2 / 0.6).abs() < 1e-15);
        assert!((p["gyn"] - 0.4 / 0.6).abs() < 1e-15);
        // without a cycle day the weighting is skipped
        let p = eval_priors(&kb, &PatientContext::new(25.0, Sex::Female)).unwrap();
        assert!((p["gyn"] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn all_zero_is_degenerate() {
        let kb = kb(vec![disease("gyn", AgeCurve::constant(0.3), true)]);
        assert_eq!(eval_priors(&kb, &PatientContext::new(25.0, Sex::Male)), Err(Error::DegeneratePrior));
    }
}
