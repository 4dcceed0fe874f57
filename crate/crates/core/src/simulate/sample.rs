use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::case_rng;
use crate::error::{Error, Result};
use crate::inference::{Finding, FindingSet};
use crate::kb::{base_rates, BaseRates, CausalNode, KnowledgeBase, PatientContext};

/// One labelled synthetic case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_id: u64,
    pub true_disease: String,
    pub patient: PatientContext,
    pub findings: FindingSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_findings: Option<FindingSet>,
    /// Dataset seed; the case stream is `case_id`.
    pub seed: u64,
}

/// Caused state of one tree node at each sampled time.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeHistory {
    pub id: String,
    pub parent: Option<usize>,
    pub caused: Vec<bool>,
}

/// A full causal world: tree node states in pre-order, external causes, and
/// the resulting observations, all indexed by sampled time.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWorld {
    pub nodes: Vec<NodeHistory>,
    pub external: BTreeMap<String, bool>,
    pub observed: Vec<BTreeMap<String, bool>>,
}

/// Sample one world at the given times. Each link draws a single uniform that
/// is compared with its strength at every time, and each external cause is one
/// draw shared by all times. Every symptom in `symptom_ids` receives an
/// observation.
pub fn sample_world<'a, R: Rng + ?Sized>(
    tree: &CausalNode,
    times: &[f64],
    symptom_ids: impl IntoIterator<Item = &'a str>,
    rates: &BaseRates,
    rng: &mut R,
) -> SampledWorld {
    let mut nodes = vec![NodeHistory { id: tree.id.clone(), parent: None, caused: vec![true; times.len()] }];
    let mut chain: BTreeMap<String, Vec<bool>> = BTreeMap::new();
    descend(tree, 0, times, &mut nodes, &mut chain, rng);

    let mut external = BTreeMap::new();
    let mut observed = vec![BTreeMap::new(); times.len()];
    for id in symptom_ids {
        let ext = rng.random::<f64>() < rates.get(id);
        external.insert(id.to_string(), ext);
        for (k, obs) in observed.iter_mut().enumerate() {
            let caused = chain.get(id).is_some_and(|c| c[k]);
            obs.insert(id.to_string(), caused || ext);
        }
    }
    SampledWorld { nodes, external, observed }
}

fn descend<R: Rng + ?Sized>(
    node: &CausalNode,
    index: usize,
    times: &[f64],
    nodes: &mut Vec<NodeHistory>,
    chain: &mut BTreeMap<String, Vec<bool>>,
    rng: &mut R,
) {
    for edge in &node.children {
        let u = rng.random::<f64>();
        let caused: Vec<bool> =
            times.iter().enumerate().map(|(k, &t)| nodes[index].caused[k] && u < edge.link.eval(t)).collect();
        if let Some(id) = edge.child.symptom_id() {
            chain.insert(id.to_string(), caused.clone());
        }
        nodes.push(NodeHistory { id: edge.child.id.clone(), parent: Some(index), caused });
        let child_index = nodes.len() - 1;
        descend(&edge.child, child_index, times, nodes, chain, rng);
    }
}

fn to_findings(t: f64, observed: &BTreeMap<String, bool>) -> FindingSet {
    let mut f = FindingSet::new(t);
    for (id, &present) in observed {
        f.set(id.clone(), if present { Finding::Present } else { Finding::Absent });
    }
    f
}

/// Sample a fully observed case of `disease_id` at time `t` from stream 0 of `seed`.
pub fn sample_case(
    kb: &KnowledgeBase,
    patient: &PatientContext,
    disease_id: &str,
    t: f64,
    seed: u64,
) -> Result<CaseRecord> {
    sample_case_in_stream(kb, patient, disease_id, &[t], seed, 0)
}

/// Sample a case at one or two times using stream `case_id` of `seed`.
pub fn sample_case_in_stream(
    kb: &KnowledgeBase,
    patient: &PatientContext,
    disease_id: &str,
    times: &[f64],
    seed: u64,
    case_id: u64,
) -> Result<CaseRecord> {
    let mut rng = case_rng(seed, case_id);
    sample_case_with(kb, patient, disease_id, times, seed, case_id, &mut rng)
}

pub(crate) fn sample_case_with<R: Rng + ?Sized>(
    kb: &KnowledgeBase,
    patient: &PatientContext,
    disease_id: &str,
    times: &[f64],
    seed: u64,
    case_id: u64,
    rng: &mut R,
) -> Result<CaseRecord> {
    let disease = kb.disease(disease_id).ok_or_else(|| Error::UnknownDisease(disease_id.into()))?;
    if times.is_empty() || times.len() > 2 {
        return Err(Error::InvalidFindings(format!("expected one or two times, got {}", times.len())));
    }
    let rates = base_rates(kb, patient);
    let world = sample_world(&disease.tree, times, kb.symptom_ids(), &rates, rng);
    let findings = to_findings(times[0], &world.observed[0]);
    let second_findings = world.observed.get(1).map(|o| to_findings(times[1], o));
    Ok(CaseRecord {
        case_id,
        true_disease: disease_id.to_string(),
        patient: patient.clone(),
        findings,
        second_findings,
        seed,
    })
}
