//! Knowledge-base domain model.
//!
//! A knowledge base holds a pool of mutually exclusive diseases. Each disease
//! is a tree rooted at the disease itself: internal nodes are latent
//! pathstates, leaves reference symptoms from the shared registry, and every
//! edge carries a [`TimeCurve`] giving the probability that the child is
//! caused by its parent at a given time since onset. Severity levels are
//! plain pathstate-below-pathstate edges.

mod priors;
mod validate;

pub use priors::{base_rates, eval_priors, BaseRates, Priors};
pub use validate::{validate_kb, IssueSeverity, KbCounts, ValidationIssue, ValidationReport};

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::curve::{AgeCurve, CycleCurve, TimeCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Male,
    Female,
}

impl Sex {
    pub const ALL: [Sex; 2] = [Sex::Male, Sex::Female];

    pub fn as_str(self) -> &'static str {
        match self {
            Sex::Male => "male",
            Sex::Female => "female",
        }
    }

    pub fn parse(s: &str) -> Option<Sex> {
        match s {
            "male" => Some(Sex::Male),
            "female" => Some(Sex::Female),
            _ => None,
        }
    }
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A symptom in the shared registry, with its external-cause base rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SymptomDef {
    pub id: String,
    pub label: String,
    pub base_rate: IndexMap<Sex, AgeCurve>,
}

impl SymptomDef {
    pub fn base_rate_at(&self, sex: Sex, age: f64) -> f64 {
        self.base_rate.get(&sex).map_or(0.0, |c| c.eval(age))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    DiseaseRoot,
    Pathstate,
    /// Leaf; the node id is the referenced symptom id.
    SymptomRef,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalNode {
    pub id: String,
    pub kind: NodeKind,
    pub children: Vec<Edge>,
}

/// A parent-to-child causal link.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub link: TimeCurve,
    pub child: CausalNode,
}

impl CausalNode {
    pub fn root(id: impl Into<String>) -> Self {
        Self { id: id.into(), kind: NodeKind::DiseaseRoot, children: Vec::new() }
    }

    pub fn pathstate(id: impl Into<String>) -> Self {
        Self { id: id.into(), kind: NodeKind::Pathstate, children: Vec::new() }
    }

    pub fn symptom(id: impl Into<String>) -> Self {
        Self { id: id.into(), kind: NodeKind::SymptomRef, children: Vec::new() }
    }

    /// Builder helper: append a child under `link`.
    pub fn with(mut self, link: TimeCurve, child: CausalNode) -> Self {
        self.children.push(Edge { link, child });
        self
    }

    pub fn symptom_id(&self) -> Option<&str> {
        match self.kind {
            NodeKind::SymptomRef => Some(&self.id),
            _ => None,
        }
    }

    pub fn is_symptom(&self) -> bool {
        self.kind == NodeKind::SymptomRef
    }

    /// Symptom ids below this node, depth-first in declaration order.
    pub fn descendant_symptoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_symptoms(&mut out);
        out
    }

    fn collect_symptoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        if let Some(id) = self.symptom_id() {
            out.push(id);
            return;
        }
        for e in &self.children {
            e.child.collect_symptoms(out);
        }
    }

    /// Root-to-leaf chain of links reaching `symptom_id`, if it is in this tree.
    pub fn path_to(&self, symptom_id: &str) -> Option<Vec<&TimeCurve>> {
        let mut path = Vec::new();
        if self.find_path(symptom_id, &mut path) {
            Some(path)
        } else {
            None
        }
    }

    fn find_path<'a>(&'a self, symptom_id: &str, path: &mut Vec<&'a TimeCurve>) -> bool {
        for e in &self.children {
            path.push(&e.link);
            if e.child.symptom_id() == Some(symptom_id) || e.child.find_path(symptom_id, path) {
                return true;
            }
            path.pop();
        }
        false
    }

    /// Pre-order walk over every node with its depth.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a CausalNode, usize)) {
        fn go<'a>(n: &'a CausalNode, depth: usize, f: &mut impl FnMut(&'a CausalNode, usize)) {
            f(n, depth);
            for e in &n.children {
                go(&e.child, depth + 1, f);
            }
        }
        go(self, 0, f);
    }

    pub fn count_pathstates(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |node, _| {
            if node.kind == NodeKind::Pathstate {
                n += 1;
            }
        });
        n
    }
}

/// Disease-level restriction on which patients can have the disease.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SexRestriction {
    #[default]
    Any,
    FemaleOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiseaseDef {
    pub id: String,
    pub label: String,
    pub restriction: SexRestriction,
    pub prior_age: IndexMap<Sex, AgeCurve>,
    pub cycle_weight: Option<CycleCurve>,
    pub tree: CausalNode,
    /// Directly elicited symptom likelihoods, used for coherency checking.
    pub direct_likelihoods: IndexMap<String, TimeCurve>,
}

impl DiseaseDef {
    pub fn applies_to(&self, sex: Sex) -> bool {
        !(self.restriction == SexRestriction::FemaleOnly && sex == Sex::Male)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Treatment {
    Symptomatic,
    Operation,
}

impl Treatment {
    pub const ALL: [Treatment; 2] = [Treatment::Symptomatic, Treatment::Operation];

    pub fn as_str(self) -> &'static str {
        match self {
            Treatment::Symptomatic => "symptomatic",
            Treatment::Operation => "operation",
        }
    }
}

impl fmt::Display for Treatment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Expected hospital days under each treatment for one disease.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Morbidity {
    pub symptomatic: f64,
    pub operation: f64,
}

impl Morbidity {
    pub fn new(symptomatic: f64, operation: f64) -> Self {
        Self { symptomatic, operation }
    }

    pub fn days(&self, treatment: Treatment) -> f64 {
        match treatment {
            Treatment::Symptomatic => self.symptomatic,
            Treatment::Operation => self.operation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct UtilityTable {
    pub morbidity: IndexMap<String, Morbidity>,
}

impl UtilityTable {
    pub fn get(&self, disease_id: &str) -> Option<&Morbidity> {
        self.morbidity.get(disease_id)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KbMetadata {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KnowledgeBase {
    pub metadata: KbMetadata,
    pub symptoms: Vec<SymptomDef>,
    pub diseases: Vec<DiseaseDef>,
    pub utilities: UtilityTable,
}

impl KnowledgeBase {
    pub fn symptom(&self, id: &str) -> Option<&SymptomDef> {
        self.symptoms.iter().find(|s| s.id == id)
    }

    pub fn disease(&self, id: &str) -> Option<&DiseaseDef> {
        self.diseases.iter().find(|d| d.id == id)
    }

    pub fn disease_ids(&self) -> impl Iterator<Item = &str> {
        self.diseases.iter().map(|d| d.id.as_str())
    }

    pub fn symptom_ids(&self) -> impl Iterator<Item = &str> {
        self.symptoms.iter().map(|s| s.id.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatientContext {
    pub age: f64,
    pub sex: Sex,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_day: Option<u8>,
    /// Hours since the first observed symptom at the time of consultation.
    #[serde(default)]
    pub onset_time: f64,
}

impl PatientContext {
    pub fn new(age: f64, sex: Sex) -> Self {
        Self { age, sex, cycle_day: None, onset_time: 0.0 }
    }

    pub fn with_cycle_day(mut self, day: u8) -> Self {
        self.cycle_day = Some(day);
        self
    }

    pub fn with_onset(mut self, hours: f64) -> Self {
        self.onset_time = hours;
        self
    }

    /// Invariant violations, if any.
    pub fn check(&self) -> Result<(), String> {
        if !self.age.is_finite() || !(0.0..=crate::curve::MAX_AGE).contains(&self.age) {
            return Err(format!("age {} outside [0, {}]", self.age, crate::curve::MAX_AGE));
        }
        if !self.onset_time.is_finite() || self.onset_time < 0.0 {
            return Err(format!("onset_time {} must be >= 0", self.onset_time));
        }
        match self.cycle_day {
            Some(_) if self.sex == Sex::Male => Err("cycle_day given for a male patient".into()),
            Some(d) if !(1..=28).contains(&d) => Err(format!("cycle_day {d} outside 1..=28")),
            _ => Ok(()),
        }
    }
}
