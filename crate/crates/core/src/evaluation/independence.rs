use crate::error::{Error, Result};
use crate::inference::{assemble, external_only_with, Finding, FindingSet, PosteriorReport};
use crate::kb::{base_rates, BaseRates, CausalNode, KnowledgeBase, PatientContext, Priors};

/// Naive-Bayes likelihood of the findings among the symptoms `tree` causes.
///
/// Each symptom is treated as independent given the disease, with its chain
/// probability taken as the product of the links on its path. Leaves use the
/// same noisy-OR rule as the causal model.
pub fn independence_likelihood_with(tree: &CausalNode, findings: &FindingSet, t: f64, rates: &BaseRates) -> f64 {
    let mut out = 1.0;
    for id in tree.descendant_symptoms() {
        let finding = findings.get(id);
        if finding == Finding::Unknown {
            continue;
        }
        let q: f64 = tree.path_to(id).map_or(0.0, |path| path.iter().map(|l| l.eval(t)).product());
        let b = rates.get(id);
        out *= match finding {
            Finding::Present => q + b - q * b,
            _ => (1.0 - q) * (1.0 - b),
        };
    }
    out
}

pub fn independence_likelihood(
    kb: &KnowledgeBase,
    disease_id: &str,
    findings: &FindingSet,
    t: f64,
    patient: &PatientContext,
) -> Result<f64> {
    let disease = kb.disease(disease_id).ok_or_else(|| Error::UnknownDisease(disease_id.into()))?;
    Ok(independence_likelihood_with(&disease.tree, findings, t, &base_rates(kb, patient)))
}

/// Posterior of the independence model. Out-of-tree symptoms use the same
/// external factor as the causal posterior.
pub fn independence_posterior_with_priors(
    kb: &KnowledgeBase,
    priors: &Priors,
    patient: &PatientContext,
    findings: &FindingSet,
) -> Result<PosteriorReport> {
    findings.check(kb)?;
    let rates = base_rates(kb, patient);
    let t = findings.measurement_time;
    let mut report = assemble(kb, priors, |d| {
        let caused = d.tree.descendant_symptoms();
        let outside = kb.symptom_ids().filter(|id| !caused.contains(id));
        (independence_likelihood_with(&d.tree, findings, t, &rates), external_only_with(outside, findings, &rates))
    })?;
    report.measurement_time = t;
    Ok(report)
}
