use indexmap::IndexMap;
use serde::Serialize;

use super::hood::{external_only_with, hood_rev_with};
use super::FindingSet;
use crate::error::{Error, Result};
use crate::kb::{base_rates, eval_priors, DiseaseDef, KnowledgeBase, PatientContext, Priors};

/// Factors of one disease's Bayes numerator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub prior: f64,
    /// Likelihood of the findings among symptoms the disease can cause.
    pub in_tree_likelihood: f64,
    /// Probability of the remaining findings from external causes only.
    pub external_factor: f64,
    pub numerator: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorReport {
    pub posteriors: IndexMap<String, f64>,
    pub decomposition: IndexMap<String, Decomposition>,
    pub measurement_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_measurement_time: Option<f64>,
}

impl PosteriorReport {
    pub fn get(&self, disease_id: &str) -> f64 {
        self.posteriors.get(disease_id).copied().unwrap_or(0.0)
    }

    /// Most probable disease; ties resolve to knowledge-base order.
    pub fn argmax(&self) -> Option<(&str, f64)> {
        self.posteriors.iter().fold(None, |best: Option<(&str, f64)>, (id, &p)| match best {
            Some((_, bp)) if bp >= p => best,
            _ => Some((id.as_str(), p)),
        })
    }
}

/// Posterior over the disease pool with patient-conditioned priors.
pub fn posterior(kb: &KnowledgeBase, patient: &PatientContext, findings: &FindingSet) -> Result<PosteriorReport> {
    patient.check().map_err(Error::InvalidPatient)?;
    let priors = eval_priors(kb, patient)?;
    posterior_with_priors(kb, &priors, patient, findings)
}

/// Posterior with explicit priors. Diseases absent from `priors` get prior 0;
/// the given values are renormalized.
pub fn posterior_with_priors(
    kb: &KnowledgeBase,
    priors: &Priors,
    patient: &PatientContext,
    findings: &FindingSet,
) -> Result<PosteriorReport> {
    findings.check(kb)?;
    let rates = base_rates(kb, patient);
    let t = findings.measurement_time;
    let mut report = assemble(kb, priors, |d| {
        let in_tree = hood_rev_with(&d.tree, findings, t, &rates);
        let caused = d.tree.descendant_symptoms();
        let outside = kb.symptom_ids().filter(|id| !caused.contains(id));
        (in_tree, external_only_with(outside, findings, &rates))
    })?;
    report.measurement_time = t;
    Ok(report)
}

/// Normalize `prior * in_tree * external` over diseases. `likelihood` returns
/// the in-tree likelihood and external factor of one disease.
pub(crate) fn assemble(
    kb: &KnowledgeBase,
    priors: &Priors,
    mut likelihood: impl FnMut(&DiseaseDef) -> (f64, f64),
) -> Result<PosteriorReport> {
    for (id, &p) in priors {
        if kb.disease(id).is_none() {
            return Err(Error::UnknownDisease(id.clone()));
        }
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidPrior(format!("prior {p} for `{id}` must be finite and >= 0")));
        }
    }
    let prior_total: f64 = kb.diseases.iter().map(|d| priors.get(&d.id).copied().unwrap_or(0.0)).sum();
    if !(prior_total > 0.0) || !prior_total.is_finite() {
        return Err(Error::DegeneratePrior);
    }
    let mut decomposition = IndexMap::with_capacity(kb.diseases.len());
    let mut total = 0.0;
    for d in &kb.diseases {
        let prior = priors.get(&d.id).copied().unwrap_or(0.0) / prior_total;
        let (in_tree_likelihood, external_factor) = likelihood(d);
        let numerator = prior * in_tree_likelihood * external_factor;
        total += numerator;
        decomposition.insert(d.id.clone(), Decomposition { prior, in_tree_likelihood, external_factor, numerator });
    }
    if !(total > 0.0) {
        return Err(Error::InconsistentEvidence);
    }
    let posteriors = decomposition.iter().map(|(id, dec)| (id.clone(), dec.numerator / total)).collect();
    Ok(PosteriorReport { posteriors, decomposition, measurement_time: 0.0, second_measurement_time: None })
}
