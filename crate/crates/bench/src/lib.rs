//! Shared workloads for the criterion benches.

use pathstate_core::simulate::{generate_dataset, CaseRecord, DatasetConfig};
use pathstate_core::{fixture, Finding, FindingSet, KnowledgeBase, PatientContext, Sex};

/// A mid-course presentation on the bundled knowledge base.
pub fn typical_case() -> (PatientContext, FindingSet) {
    let patient = PatientContext::new(24.0, Sex::Female).with_cycle_day(12);
    let findings = FindingSet::new(30.0)
        .with("periumbilical_pain", Finding::Present)
        .with("rlq_pain", Finding::Present)
        .with("tenderness", Finding::Present)
        .with("nausea", Finding::Present)
        .with("fever", Finding::Absent)
        .with("diarrhea", Finding::Absent);
    (patient, findings)
}

/// The same presentation seen at two times.
pub fn two_time_case() -> (PatientContext, FindingSet, FindingSet) {
    let (patient, second) = typical_case();
    let first = FindingSet::new(8.0).with("periumbilical_pain", Finding::Present).with("rlq_pain", Finding::Absent);
    (patient, first, second)
}

/// `n` cases each of appendicitis and nonspecific pain.
pub fn dataset(kb: &KnowledgeBase, n: usize) -> Vec<CaseRecord> {
    generate_dataset(kb, &DatasetConfig::new([fixture::APPENDICITIS, fixture::NSAP], n, 2024))
        .expect("fixture classes exist")
}
