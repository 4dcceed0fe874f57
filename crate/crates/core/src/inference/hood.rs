//! The likelihood recursion over a disease tree.
//!
//! Given that a node is caused, its children are independent. A child that is
//! caused contributes the likelihood of its own subtree; a child that is not
//! caused leaves each descendant symptom to its external cause alone. Symptom
//! leaves combine the chain and the external cause as a noisy-OR.

use super::{Finding, FindingSet};
use crate::kb::{base_rates, BaseRates, CausalNode, KnowledgeBase, PatientContext};

/// Likelihood of the findings below `node` without external causes.
pub fn hood_basic(node: &CausalNode, findings: &FindingSet, t: f64) -> f64 {
    recurse(node, findings, t, &|_| 0.0).0
}

/// Likelihood of the findings below `node`, allowing each symptom an external
/// cause at its base rate for this patient.
pub fn hood_rev(node: &CausalNode, findings: &FindingSet, t: f64, kb: &KnowledgeBase, patient: &PatientContext) -> f64 {
    hood_rev_with(node, findings, t, &base_rates(kb, patient))
}

pub fn hood_rev_with(node: &CausalNode, findings: &FindingSet, t: f64, rates: &BaseRates) -> f64 {
    recurse(node, findings, t, &|id| rates.get(id)).0
}

/// Product over `symptom_ids` of the probability that each finding arose from
/// its external cause alone.
pub fn external_only_likelihood<'a>(
    symptom_ids: impl IntoIterator<Item = &'a str>,
    findings: &FindingSet,
    kb: &KnowledgeBase,
    patient: &PatientContext,
) -> f64 {
    external_only_with(symptom_ids, findings, &base_rates(kb, patient))
}

pub fn external_only_with<'a>(
    symptom_ids: impl IntoIterator<Item = &'a str>,
    findings: &FindingSet,
    rates: &BaseRates,
) -> f64 {
    external(symptom_ids, findings, &|id| rates.get(id))
}

fn external<'a>(ids: impl IntoIterator<Item = &'a str>, findings: &FindingSet, rate: &dyn Fn(&str) -> f64) -> f64 {
    ids.into_iter()
        .map(|id| match findings.get(id) {
            Finding::Present => rate(id),
            Finding::Absent => 1.0 - rate(id),
            Finding::Unknown => 1.0,
        })
        .product()
}

/// Returns the likelihood and whether any descendant finding is known. Subtrees
/// with nothing known contribute exactly 1.
fn recurse(node: &CausalNode, findings: &FindingSet, t: f64, rate: &dyn Fn(&str) -> f64) -> (f64, bool) {
    let mut likelihood = 1.0;
    let mut known = false;
    for edge in &node.children {
        let q = edge.link.eval(t);
        let child = &edge.child;
        let factor = if let Some(id) = child.symptom_id() {
            let b = rate(id);
            match findings.get(id) {
                Finding::Present => q + b - q * b,
                Finding::Absent => (1.0 - q) * (1.0 - b),
                Finding::Unknown => continue,
            }
        } else {
            let (h, child_known) = recurse(child, findings, t, rate);
            if !child_known {
                continue;
            }
            let ext = external(child.descendant_symptoms(), findings, rate);
            q * h + (1.0 - q) * ext
        };
        known = true;
        likelihood *= factor;
    }
    (likelihood, known)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::curve::TimeCurve;

    fn c(p: f64) -> TimeCurve {
        TimeCurve::constant(p)
    }

    fn gi_tree(p: f64, q: f64, r: f64) -> CausalNode {
        CausalNode::root("appendicitis").with(
            c(p),
            CausalNode::pathstate("gi")
                .with(c(q), CausalNode::symptom("anorexia"))
                .with(c(r), CausalNode::symptom("nausea")),
        )
    }

    fn rates(pairs: &[(&str, f64)]) -> BaseRates {
        BaseRates::from_map(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect::<HashMap<_, _>>())
    }

    #[test]
    fn all_unknown_is_one() {
        let f = FindingSet::new(5.0);
        assert_eq!(hood_basic(&gi_tree(0.8, 0.6, 0.5), &f, 5.0), 1.0);
        let r = rates(&[("anorexia", 0.3), ("nausea", 0.2)]);
        assert_eq!(hood_rev_with(&gi_tree(0.8, 0.6, 0.5), &f, 5.0, &r), 1.0);
    }

    #[test]
    fn shared_pathstate_gives_pqr() {
        let f = FindingSet::new(0.0).with("anorexia", Finding::Present).with("nausea", Finding::Present);
        let h = hood_basic(&gi_tree(0.8, 0.6, 0.5), &f, 0.0);
        assert!((h - 0.24).abs() < 1e-15, "{h}");
    }

    #[test]
    fn absent_symptom_below_uncaused_pathstate() {
        // not caused: 1 - p*q
        let f = FindingSet::new(0.0).with("anorexia", Finding::Absent);
        let h = hood_basic(&gi_tree(0.8, 0.6, 0.5), &f, 0.0);
        assert!((h - (1.0 - 0.8 * 0.6)).abs() < 1e-15);
    }

    #[test]
    fn external_only_products() {
        let r = rates(&[("a", 0.2), ("b", 0.1)]);
        assert_eq!(external_only_with(["a", "b"], &FindingSet::new(0.0), &r), 1.0);
        let f = FindingSet::new(0.0).with("a", Finding::Present);
        assert_eq!(external_only_with(["a"], &f, &r), 0.2);
        let f = f.with("b", Finding::Absent);
        assert!((external_only_with(["a", "b"], &f, &r) - 0.18).abs() < 1e-15);
    }

    #[test]
    fn single_leaf_noisy_or() {
        let tree = CausalNode::root("d").with(c(0.5), CausalNode::symptom("s"));
        let r = rates(&[("s", 0.2)]);
        let f = FindingSet::new(0.0).with("s", Finding::Present);
        assert!((hood_rev_with(&tree, &f, 0.0, &r) - 0.6).abs() < 1e-15);
        let f = FindingSet::new(0.0).with("s", Finding::Absent);
        assert!((hood_rev_with(&tree, &f, 0.0, &r) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn zero_base_rates_reduce_to_basic() {
        let tree = gi_tree(0.7, 0.4, 0.9);
        let r = rates(&[("anorexia", 0.0), ("nausea", 0.0)]);
        for (a, n) in [
            (Finding::Present, Finding::Absent),
            (Finding::Absent, Finding::Absent),
            (Finding::Unknown, Finding::Present),
        ] {
            let f = FindingSet::new(0.0).with("anorexia", a).with("nausea", n);
            assert_eq!(hood_rev_with(&tree, &f, 0.0, &r), hood_basic(&tree, &f, 0.0));
        }
    }

    #[test]
    fn link_curves_are_read_at_measurement_time() {
        let tree = CausalNode::root("d").with(TimeCurve::new([(0.0, 0.1), (24.0, 0.5)]), CausalNode::symptom("s"));
        let f = FindingSet::new(0.0).with("s", Finding::Present);
        assert!((hood_basic(&tree, &f, 12.0) - 0.3).abs() < 1e-15);
    }
}
