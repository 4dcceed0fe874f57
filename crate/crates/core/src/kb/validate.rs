use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::{CausalNode, KnowledgeBase, NodeKind, Sex, SexRestriction};
use crate::curve::CurveIssue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IssueSeverity {
    Error,
    Warning,
}

/// One located finding from [`validate_kb`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationIssue {
    pub severity: IssueSeverity,
    /// Path to the offending item, e.g. `disease appendicitis/arlq/amodrlq`.
    pub location: String,
    /// Field within the item, e.g. `link` or `prior female`.
    pub field: String,
    pub message: String,
    /// Set when the problem is a single curve point.
    #[serde(skip)]
    pub curve_issue: Option<CurveIssue>,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            IssueSeverity::Error => "error",
            IssueSeverity::Warning => "warning",
        };
        if self.field.is_empty() {
            write!(f, "{sev}: {}: {}", self.location, self.message)
        } else {
            write!(f, "{sev}: {} [{}]: {}", self.location, self.field, self.message)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct KbCounts {
    pub diseases: usize,
    pub pathstates: usize,
    pub symptoms: usize,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
    pub counts: KbCounts,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == IssueSeverity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == IssueSeverity::Warning)
    }

    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }
}

struct Checker<'a> {
    kb: &'a KnowledgeBase,
    issues: Vec<ValidationIssue>,
}

impl Checker<'_> {
    fn push(&mut self, severity: IssueSeverity, location: &str, field: &str, message: String) {
        self.issues.push(ValidationIssue {
            severity,
            location: location.to_string(),
            field: field.to_string(),
            message,
            curve_issue: None,
        });
    }

    fn error(&mut self, location: &str, field: &str, message: impl Into<String>) {
        self.push(IssueSeverity::Error, location, field, message.into());
    }

    fn warning(&mut self, location: &str, field: &str, message: impl Into<String>) {
        self.push(IssueSeverity::Warning, location, field, message.into());
    }

    fn curve(&mut self, location: &str, field: &str, issues: Vec<CurveIssue>) {
        for issue in issues {
            self.error(location, field, issue.to_string());
            if let Some(last) = self.issues.last_mut() {
                last.curve_issue = Some(issue);
            }
        }
    }

    fn symptoms(&mut self) {
        let mut seen = HashSet::new();
        for s in &self.kb.symptoms {
            let loc = format!("symptom {}", s.id);
            if s.id.is_empty() {
                self.error(&loc, "id", "empty symptom id");
            }
            if !seen.insert(s.id.as_str()) {
                self.error(&loc, "id", format!("duplicate symptom id `{}`", s.id));
            }
            for sex in Sex::ALL {
                let field = format!("base {sex}");
                match s.base_rate.get(&sex) {
                    Some(c) => self.curve(&loc, &field, c.check()),
                    None => self.error(&loc, &field, format!("missing base rate for {sex}")),
                }
            }
        }
    }

    fn diseases(&mut self) {
        let mut seen = HashSet::new();
        let mut referenced = HashSet::new();
        for d in &self.kb.diseases {
            let loc = format!("disease {}", d.id);
            if !seen.insert(d.id.as_str()) {
                self.error(&loc, "id", format!("duplicate disease id `{}`", d.id));
            }
            for sex in Sex::ALL {
                let field = format!("prior {sex}");
                let allowed = d.applies_to(sex);
                match (d.prior_age.get(&sex), allowed) {
                    (Some(c), true) => self.curve(&loc, &field, c.check()),
                    (None, true) => self.error(&loc, &field, format!("missing prior for {sex}")),
                    (Some(_), false) => self.error(&loc, &field, format!("female-only disease has a {sex} prior")),
                    (None, false) => {}
                }
            }
            if let Some(w) = &d.cycle_weight {
                if d.restriction != SexRestriction::FemaleOnly {
                    self.error(&loc, "cycle", "cycle weighting requires a female-only disease");
                }
                self.curve(&loc, "cycle", w.check());
            }
            if d.tree.kind != NodeKind::DiseaseRoot {
                self.error(&loc, "tree", "tree root must be the disease node");
            }
            let mut in_tree = HashSet::new();
            let mut node_ids = HashSet::new();
            self.node(&d.tree, &loc, true, &mut in_tree, &mut node_ids);
            for (sid, curve) in &d.direct_likelihoods {
                let field = format!("direct {sid}");
                if self.kb.symptom(sid).is_none() {
                    self.error(&loc, &field, format!("unresolved symptom reference `{sid}`"));
                } else if !in_tree.contains(sid.as_str()) {
                    self.error(&loc, &field, format!("symptom `{sid}` is not caused by this disease"));
                }
                self.curve(&loc, &field, curve.check());
            }
            referenced.extend(in_tree);
        }
        for s in &self.kb.symptoms {
            if !referenced.contains(s.id.as_str()) {
                self.warning(&format!("symptom {}", s.id), "", "not caused by any disease");
            }
        }
    }

    fn node<'n>(
        &mut self,
        node: &'n CausalNode,
        loc: &str,
        is_root: bool,
        in_tree: &mut HashSet<&'n str>,
        node_ids: &mut HashSet<&'n str>,
    ) {
        match node.kind {
            NodeKind::DiseaseRoot if !is_root => {
                self.error(loc, "kind", "disease node below the root");
            }
            NodeKind::SymptomRef => {
                if self.kb.symptom(&node.id).is_none() {
                    self.error(loc, "symptom", format!("unresolved symptom reference `{}`", node.id));
                }
                if !in_tree.insert(node.id.as_str()) {
                    self.error(loc, "symptom", format!("symptom `{}` appears twice in this tree", node.id));
                }
                if !node.children.is_empty() {
                    self.error(loc, "children", "symptom nodes must be leaves");
                }
            }
            NodeKind::Pathstate => {
                if !node_ids.insert(node.id.as_str()) {
                    self.error(loc, "id", format!("pathstate `{}` appears twice in this tree", node.id));
                }
                if node.children.is_empty() {
                    self.warning(loc, "children", format!("pathstate `{}` causes nothing", node.id));
                }
            }
            NodeKind::DiseaseRoot => {
                if node.children.is_empty() {
                    self.warning(loc, "children", "disease causes no symptoms");
                }
            }
        }
        for (i, e) in node.children.iter().enumerate() {
            let child_loc = format!("{loc}/{}", e.child.id);
            self.curve(&child_loc, &format!("link (child {i})"), e.link.check());
            self.node(&e.child, &child_loc, false, in_tree, node_ids);
        }
    }

    fn utilities(&mut self) {
        for d in &self.kb.diseases {
            if self.kb.utilities.get(&d.id).is_none() {
                self.error(&format!("utilities {}", d.id), "", "missing utility entry");
            }
        }
        for (id, m) in &self.kb.utilities.morbidity {
            let loc = format!("utilities {id}");
            if self.kb.disease(id).is_none() {
                self.error(&loc, "", format!("utility for unknown disease `{id}`"));
            }
            for (field, v) in [("symptomatic", m.symptomatic), ("operation", m.operation)] {
                if !v.is_finite() || v < 0.0 {
                    self.error(&loc, field, format!("expected days {v} must be >= 0"));
                }
            }
        }
    }
}

/// Check every structural invariant of a knowledge base without stopping at
/// the first problem.
pub fn validate_kb(kb: &KnowledgeBase) -> ValidationReport {
    let mut c = Checker { kb, issues: Vec::new() };
    c.symptoms();
    c.diseases();
    c.utilities();
    let pathstates = kb.diseases.iter().map(|d| d.tree.count_pathstates()).sum();
    let mut nodes = 0;
    for d in &kb.diseases {
        d.tree.walk(&mut |_, _| nodes += 1);
    }
    ValidationReport {
        issues: c.issues,
        counts: KbCounts { diseases: kb.diseases.len(), pathstates, symptoms: kb.symptoms.len(), nodes },
    }
}
