//! Brute-force enumeration of causal worlds.
//!
//! Every link either fires or not and every in-tree symptom either has an
//! external cause or not. Each world is scored independently and its
//! observation tallied, without reusing any of the recursion in `inference`.

use crate::error::{Error, Result};
use crate::inference::FindingSet;
use crate::kb::{base_rates, BaseRates, CausalNode, KnowledgeBase, PatientContext};

/// Largest number of binary world variables (links plus external causes)
/// that [`enumerate_joint`] will expand.
pub const MAX_ENUMERATION_VARS: usize = 20;

/// Exact distribution over present/absent configurations of a tree's symptoms.
/// Bit `i` of a configuration index is set when `symptoms[i]` is present.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub symptoms: Vec<String>,
    pub probs: Vec<f64>,
}

impl JointDistribution {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn prob(&self, config: &[bool]) -> f64 {
        let idx = config.iter().enumerate().fold(0usize, |acc, (i, &p)| acc | (usize::from(p) << i));
        self.probs[idx]
    }

    /// Probability of the findings, summing over configurations that agree
    /// with every known finding.
    pub fn marginal(&self, findings: &FindingSet) -> f64 {
        let (mut must, mut want) = (0usize, 0usize);
        for (i, id) in self.symptoms.iter().enumerate() {
            match findings.get(id) {
                crate::inference::Finding::Present => {
                    must |= 1 << i;
                    want |= 1 << i;
                }
                crate::inference::Finding::Absent => must |= 1 << i,
                crate::inference::Finding::Unknown => {}
            }
        }
        self.probs.iter().enumerate().filter(|(c, _)| c & must == want).map(|(_, p)| p).sum()
    }
}

/// Tree flattened in pre-order. Node 0 is the root.
struct Flat {
    parent: Vec<usize>,
    link: Vec<(f64, f64)>,
    symptom: Vec<Option<usize>>,
    symptoms: Vec<String>,
}

fn flatten(tree: &CausalNode, t1: f64, t2: f64) -> Flat {
    let mut flat = Flat { parent: vec![0], link: vec![(1.0, 1.0)], symptom: vec![None], symptoms: Vec::new() };
    fn go(node: &CausalNode, idx: usize, t1: f64, t2: f64, flat: &mut Flat) {
        for e in &node.children {
            flat.parent.push(idx);
            flat.link.push((e.link.eval(t1), e.link.eval(t2)));
            let sym = e.child.symptom_id().map(|id| {
                flat.symptoms.push(id.to_string());
                flat.symptoms.len() - 1
            });
            flat.symptom.push(sym);
            let me = flat.parent.len() - 1;
            go(&e.child, me, t1, t2, flat);
        }
    }
    go(tree, 0, t1, t2, &mut flat);
    flat
}

/// Exact joint distribution of the tree's symptoms at time `t`.
pub fn enumerate_joint(
    tree: &CausalNode,
    t: f64,
    kb: &KnowledgeBase,
    patient: &PatientContext,
) -> Result<JointDistribution> {
    enumerate_joint_with(tree, t, &base_rates(kb, patient))
}

pub fn enumerate_joint_with(tree: &CausalNode, t: f64, rates: &BaseRates) -> Result<JointDistribution> {
    let flat = flatten(tree, t, t);
    let links = flat.parent.len() - 1;
    let k = flat.symptoms.len();
    let vars = links + k;
    if vars > MAX_ENUMERATION_VARS {
        return Err(Error::EnumerationTooLarge { vars, limit: MAX_ENUMERATION_VARS });
    }
    let base: Vec<f64> = flat.symptoms.iter().map(|s| rates.get(s)).collect();
    let mut probs = vec![0.0; 1 << k];
    let mut caused = vec![false; flat.parent.len()];
    for world in 0u64..(1u64 << vars) {
        let mut p = 1.0;
        let mut config = 0usize;
        caused[0] = true;
        for j in 1..=links {
            let fires = world >> (j - 1) & 1 == 1;
            let q = flat.link[j].0;
            p *= if fires { q } else { 1.0 - q };
            caused[j] = caused[flat.parent[j]] && fires;
            if let Some(s) = flat.symptom[j] {
                if caused[j] {
                    config |= 1 << s;
                }
            }
        }
        for (s, &b) in base.iter().enumerate() {
            let ext = world >> (links + s) & 1 == 1;
            p *= if ext { b } else { 1.0 - b };
            if ext {
                config |= 1 << s;
            }
        }
        probs[config] += p;
    }
    Ok(JointDistribution { symptoms: flat.symptoms, probs })
}

/// Probability of observing `first` then `second` under the disease tree,
/// by enumerating every link outcome (fires at both times, only at the time it
/// is stronger, or never) and every persistent external cause.
pub fn enumerate_two_time(
    tree: &CausalNode,
    first: &FindingSet,
    second: &FindingSet,
    rates: &BaseRates,
) -> Result<f64> {
    let (t1, t2) = (first.measurement_time, second.measurement_time);
    let flat = flatten(tree, t1, t2);
    let links = flat.parent.len() - 1;
    let k = flat.symptoms.len();
    let worlds = 3f64.powi(links as i32) * 2f64.powi(k as i32);
    if worlds > (1u64 << MAX_ENUMERATION_VARS) as f64 {
        return Err(Error::EnumerationTooLarge { vars: links + k, limit: MAX_ENUMERATION_VARS });
    }
    let base: Vec<f64> = flat.symptoms.iter().map(|s| rates.get(s)).collect();
    let mut outcome = vec![0u8; links + 1];
    let mut caused = vec![(false, false); flat.parent.len()];
    let mut total = 0.0;
    loop {
        // link outcomes: 0 = fires at both times, 1 = only where stronger, 2 = never
        let mut p = 1.0;
        caused[0] = (true, true);
        let mut chain = vec![(false, false); k];
        for j in 1..=links {
            let (q1, q2) = flat.link[j];
            let (lo, hi) = (q1.min(q2), q1.max(q2));
            let (f1, f2) = match outcome[j] {
                0 => {
                    p *= lo;
                    (true, true)
                }
                1 => {
                    p *= hi - lo;
                    if q1 > q2 {
                        (true, false)
                    } else {
                        (false, true)
                    }
                }
                _ => {
                    p *= 1.0 - hi;
                    (false, false)
                }
            };
            let par = caused[flat.parent[j]];
            caused[j] = (par.0 && f1, par.1 && f2);
            if let Some(s) = flat.symptom[j] {
                chain[s] = caused[j];
            }
        }
        if p > 0.0 {
            for ext_mask in 0u32..(1 << k) {
                let mut q = p;
                let mut ok = true;
                for (s, id) in flat.symptoms.iter().enumerate() {
                    let ext = ext_mask >> s & 1 == 1;
                    q *= if ext { base[s] } else { 1.0 - base[s] };
                    let seen = (chain[s].0 || ext, chain[s].1 || ext);
                    if !first.get(id).admits(seen.0) || !second.get(id).admits(seen.1) {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    total += q;
                }
            }
        }
        // next outcome vector
        let mut j = 1;
        while j <= links && outcome[j] == 2 {
            outcome[j] = 0;
            j += 1;
        }
        if j > links {
            break;
        }
        outcome[j] += 1;
    }
    Ok(total)
}
