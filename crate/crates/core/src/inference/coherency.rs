use serde::Serialize;

use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;

/// Product of the link strengths on the path from the disease to the symptom.
pub fn path_likelihood(kb: &KnowledgeBase, disease_id: &str, symptom_id: &str, t: f64) -> Result<f64> {
    let disease = kb.disease(disease_id).ok_or_else(|| Error::UnknownDisease(disease_id.into()))?;
    let path = disease
        .tree
        .path_to(symptom_id)
        .ok_or_else(|| Error::NotCaused { disease: disease_id.into(), symptom: symptom_id.into() })?;
    Ok(path.iter().map(|link| link.eval(t)).product())
}

/// One disagreement between the model's path product and a directly elicited
/// likelihood.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherencyRow {
    pub symptom_id: String,
    pub t: f64,
    pub model_p: f64,
    pub direct_p: f64,
    /// `model_p - direct_p`
    pub delta: f64,
}

/// Rows where `|path_likelihood - direct| > tol`, largest first.
///
/// A direct curve for a symptom outside the tree compares against a model
/// likelihood of 0.
pub fn coherency_report(kb: &KnowledgeBase, disease_id: &str, grid: &[f64], tol: f64) -> Result<Vec<CoherencyRow>> {
    let disease = kb.disease(disease_id).ok_or_else(|| Error::UnknownDisease(disease_id.into()))?;
    let mut rows = Vec::new();
    for (symptom_id, direct) in &disease.direct_likelihoods {
        let path = disease.tree.path_to(symptom_id);
        for &t in grid {
            let model_p = path.as_ref().map_or(0.0, |p| p.iter().map(|l| l.eval(t)).product());
            let direct_p = direct.eval(t);
            let delta = model_p - direct_p;
            if delta.abs() > tol {
                rows.push(CoherencyRow { symptom_id: symptom_id.clone(), t, model_p, direct_p, delta });
            }
        }
    }
    rows.sort_by(|a, b| b.delta.abs().total_cmp(&a.delta.abs()));
    Ok(rows)
}
