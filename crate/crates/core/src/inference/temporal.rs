//! Findings taken at two times since onset.
//!
//! A link that is stronger at one time than the other is read as an
//! implication: a child caused at the weaker time is also caused at the
//! stronger one. Each link therefore moves its child between four histories
//! (caused at neither time, only the second, only the first, both). External
//! causes are persistent: they act at both times or at neither.

use serde::{Deserialize, Serialize};

use super::posterior::assemble;
use super::{Finding, FindingSet, PosteriorReport};
use crate::error::{Error, Result};
use crate::kb::{base_rates, eval_priors, BaseRates, CausalNode, KnowledgeBase, PatientContext, Priors};

/// Probabilities of the four two-time histories of one caused child, given its
/// parent is caused at both times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternProbabilities {
    pub yes_yes: f64,
    pub yes_no: f64,
    pub no_yes: f64,
    pub no_no: f64,
}

impl PatternProbabilities {
    pub fn sum(&self) -> f64 {
        self.yes_yes + self.yes_no + self.no_yes + self.no_no
    }
}

pub fn temporal_pattern_probs(q_t1: f64, q_t2: f64) -> PatternProbabilities {
    let (lo, hi) = if q_t1 <= q_t2 { (q_t1, q_t2) } else { (q_t2, q_t1) };
    let rise = hi - lo;
    let (yes_no, no_yes) = if q_t1 <= q_t2 { (0.0, rise) } else { (rise, 0.0) };
    PatternProbabilities { yes_yes: lo, yes_no, no_yes, no_no: 1.0 - hi }
}

// History index: bit 1 = caused at t1, bit 0 = caused at t2.
const NN: usize = 0b00;
const NY: usize = 0b01;
const YN: usize = 0b10;
const YY: usize = 0b11;

type Kernel = [[f64; 4]; 4];

/// Transition from parent history to child history for one link.
fn link_kernel(q1: f64, q2: f64) -> Kernel {
    let pat = temporal_pattern_probs(q1, q2);
    let mut k = [[0.0; 4]; 4];
    k[NN][NN] = 1.0;
    k[NY][NY] = q2;
    k[NY][NN] = 1.0 - q2;
    k[YN][YN] = q1;
    k[YN][NN] = 1.0 - q1;
    k[YY][YY] = pat.yes_yes;
    k[YY][YN] = pat.yes_no;
    k[YY][NY] = pat.no_yes;
    k[YY][NN] = pat.no_no;
    k
}

fn admits(history: usize, first: Finding, second: Finding) -> bool {
    first.admits(history & YN != 0) && second.admits(history & NY != 0)
}

/// Likelihood of the observed pair given the chain-caused history `caused`,
/// with a persistent external cause of probability `b`.
fn leaf_likelihood(caused: usize, b: f64, first: Finding, second: Finding) -> f64 {
    let without = if admits(caused, first, second) { 1.0 - b } else { 0.0 };
    let with = if admits(caused | YY, first, second) { b } else { 0.0 };
    without + with
}

struct Obs<'a> {
    first: &'a FindingSet,
    second: &'a FindingSet,
    rates: &'a BaseRates,
}

impl Obs<'_> {
    fn pair(&self, id: &str) -> (Finding, Finding) {
        (self.first.get(id), self.second.get(id))
    }

    /// Likelihood vector over the node's own history; `None` when nothing
    /// below the node is known at either time.
    fn node(&self, node: &CausalNode) -> Option<[f64; 4]> {
        if let Some(id) = node.symptom_id() {
            let (f1, f2) = self.pair(id);
            if !f1.is_known() && !f2.is_known() {
                return None;
            }
            let b = self.rates.get(id);
            return Some(std::array::from_fn(|h| leaf_likelihood(h, b, f1, f2)));
        }
        let mut out = [1.0; 4];
        let mut any = false;
        for edge in &node.children {
            let Some(child) = self.node(&edge.child) else { continue };
            any = true;
            let k =
                link_kernel(edge.link.eval(self.first.measurement_time), edge.link.eval(self.second.measurement_time));
            for (parent, slot) in out.iter_mut().enumerate() {
                let s: f64 = (0..4).map(|c| k[parent][c] * child[c]).sum();
                *slot *= s;
            }
        }
        any.then_some(out)
    }

    fn external(&self, id: &str) -> f64 {
        let (f1, f2) = self.pair(id);
        leaf_likelihood(NN, self.rates.get(id), f1, f2)
    }
}

/// Likelihood of both finding sets given the disease is present throughout.
pub fn two_time_hood(tree: &CausalNode, first: &FindingSet, second: &FindingSet, rates: &BaseRates) -> f64 {
    let obs = Obs { first, second, rates };
    obs.node(tree).map_or(1.0, |l| l[YY])
}

pub fn two_time_posterior(
    kb: &KnowledgeBase,
    patient: &PatientContext,
    first: &FindingSet,
    second: &FindingSet,
) -> Result<PosteriorReport> {
    patient.check().map_err(Error::InvalidPatient)?;
    let priors = eval_priors(kb, patient)?;
    two_time_posterior_with_priors(kb, &priors, patient, first, second)
}

pub fn two_time_posterior_with_priors(
    kb: &KnowledgeBase,
    priors: &Priors,
    patient: &PatientContext,
    first: &FindingSet,
    second: &FindingSet,
) -> Result<PosteriorReport> {
    first.check(kb)?;
    second.check(kb)?;
    if !(first.measurement_time < second.measurement_time) {
        return Err(Error::InvalidFindings(format!(
            "second measurement ({} h) must follow the first ({} h)",
            second.measurement_time, first.measurement_time
        )));
    }
    let rates = base_rates(kb, patient);
    let obs = Obs { first, second, rates: &rates };
    let mut report = assemble(kb, priors, |d| {
        let in_tree = obs.node(&d.tree).map_or(1.0, |l| l[YY]);
        let caused = d.tree.descendant_symptoms();
        let external = kb.symptom_ids().filter(|id| !caused.contains(id)).map(|id| obs.external(id)).product();
        (in_tree, external)
    })?;
    report.measurement_time = first.measurement_time;
    report.second_measurement_time = Some(second.measurement_time);
    Ok(report)
}
