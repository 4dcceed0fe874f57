mod common;

use std::collections::HashMap;

use common::rng;
use pathstate_core::kb::{base_rates, BaseRates};
use pathstate_core::simulate::{
    enumerate_joint_with, enumerate_two_time, generate_dataset, mask_findings, read_cases, sample_case,
    sample_case_in_stream, sample_world, write_cases, DatasetConfig,
};
use pathstate_core::{fixture, CausalNode, Error, Finding, FindingSet, PatientContext, Sex, TimeCurve};

fn c(y: f64) -> TimeCurve {
    TimeCurve::constant(y)
}

fn shared_tree() -> CausalNode {
    CausalNode::root("d")
        .with(
            TimeCurve::new([(0.0, 0.4), (48.0, 0.85)]),
            CausalNode::pathstate("p").with(c(0.7), CausalNode::symptom("a")).with(
                TimeCurve::new([(0.0, 0.2), (72.0, 0.9)]),
                CausalNode::pathstate("q").with(c(0.6), CausalNode::symptom("b")),
            ),
        )
        .with(c(0.35), CausalNode::symptom("c"))
}

fn rates() -> BaseRates {
    BaseRates::from_map([("a", 0.1), ("b", 0.03), ("c", 0.2)].into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

#[test]
fn sample_case_is_deterministic() {
    let kb = fixture::knowledge_base();
    let patient = PatientContext::new(25.0, Sex::Female).with_cycle_day(10);
    let a = sample_case(&kb, &patient, fixture::APPENDICITIS, 30.0, 99).unwrap();
    let b = sample_case(&kb, &patient, fixture::APPENDICITIS, 30.0, 99).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.findings.values.len(), kb.symptoms.len());
    let other = sample_case_in_stream(&kb, &patient, fixture::APPENDICITIS, &[30.0], 99, 1).unwrap();
    assert_ne!(a.findings, other.findings);
}

#[test]
fn certain_links_without_external_causes_give_every_symptom() {
    let tree = CausalNode::root("d")
        .with(
            c(1.0),
            CausalNode::pathstate("p").with(c(1.0), CausalNode::symptom("a")).with(c(1.0), CausalNode::symptom("b")),
        )
        .with(c(1.0), CausalNode::symptom("c"));
    let mut r = rng(1);
    for _ in 0..100 {
        let w = sample_world(&tree, &[12.0], ["a", "b", "c"], &BaseRates::default(), &mut r);
        assert!(w.observed[0].values().all(|&v| v));
        assert!(w.nodes.iter().all(|n| n.caused[0]));
    }
}

fn within_three_sigma(p: f64, hits: usize, n: usize) -> bool {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    (hits as f64 / n as f64 - p).abs() <= 3.0 * sigma + 1e-12
}

#[test]
fn sampled_frequencies_match_enumeration() {
    let tree = shared_tree();
    let rates = rates();
    let t = 30.0;
    let joint = enumerate_joint_with(&tree, t, &rates).unwrap();
    let n = 1_000_000;
    let mut counts = vec![0usize; joint.probs.len()];
    let mut r = rng(2);
    for _ in 0..n {
        let w = sample_world(&tree, &[t], ["a", "b", "c"], &rates, &mut r);
        let idx = joint.symptoms.iter().enumerate().fold(0, |acc, (i, s)| acc | (usize::from(w.observed[0][s]) << i));
        counts[idx] += 1;
    }
    for (p, &k) in joint.probs.iter().zip(&counts) {
        assert!(within_three_sigma(*p, k, n), "p={p} observed={}", k as f64 / n as f64);
    }
}

#[test]
fn sampled_two_time_patterns_match_enumeration() {
    let tree = shared_tree();
    let rates = rates();
    let (t1, t2) = (6.0, 60.0);
    let n = 400_000;
    let mut counts: HashMap<Vec<(bool, bool)>, usize> = HashMap::new();
    let mut r = rng(3);
    for _ in 0..n {
        let w = sample_world(&tree, &[t1, t2], ["a", "b", "c"], &rates, &mut r);
        let key: Vec<(bool, bool)> = ["a", "b", "c"].iter().map(|s| (w.observed[0][*s], w.observed[1][*s])).collect();
        *counts.entry(key).or_default() += 1;
    }
    let as_finding = |v: bool| if v { Finding::Present } else { Finding::Absent };
    let mut total = 0.0;
    for (key, &k) in &counts {
        let mut first = FindingSet::new(t1);
        let mut second = FindingSet::new(t2);
        for (s, &(x, y)) in ["a", "b", "c"].iter().zip(key) {
            first.set(*s, as_finding(x));
            second.set(*s, as_finding(y));
        }
        let p = enumerate_two_time(&tree, &first, &second, &rates).unwrap();
        total += p;
        assert!(within_three_sigma(p, k, n), "{key:?}: p={p} observed={}", k as f64 / n as f64);
    }
    // patterns never sampled carry negligible mass
    assert!(total > 1.0 - 1e-4);
}

#[test]
fn dataset_counts_and_determinism() {
    let kb = fixture::knowledge_base();
    let config = DatasetConfig::new([fixture::APPENDICITIS, fixture::NSAP], 100, 42);
    let cases = generate_dataset(&kb, &config).unwrap();
    assert_eq!(cases.len(), 200);
    assert_eq!(cases.iter().filter(|c| c.true_disease == fixture::APPENDICITIS).count(), 100);
    assert_eq!(cases.iter().filter(|c| c.true_disease == fixture::NSAP).count(), 100);
    assert!(cases.iter().enumerate().all(|(i, c)| c.case_id == i as u64 && c.seed == 42));
    assert_eq!(cases, generate_dataset(&kb, &config).unwrap());
    assert_ne!(
        cases,
        generate_dataset(&kb, &DatasetConfig::new([fixture::APPENDICITIS, fixture::NSAP], 100, 43)).unwrap()
    );
}

#[test]
fn female_only_classes_get_female_patients() {
    let kb = fixture::knowledge_base();
    let cases = generate_dataset(&kb, &DatasetConfig::new(["salpingitis"], 50, 5)).unwrap();
    assert!(cases.iter().all(|c| c.patient.sex == Sex::Female && c.patient.cycle_day.is_some()));
}

#[test]
fn empty_and_bad_configs() {
    let kb = fixture::knowledge_base();
    assert!(generate_dataset(&kb, &DatasetConfig::new([fixture::NSAP], 0, 1)).unwrap().is_empty());
    assert_eq!(generate_dataset(&kb, &DatasetConfig::new(Vec::<String>::new(), 5, 1)), Err(Error::EmptyClasses));
    assert_eq!(generate_dataset(&kb, &DatasetConfig::new(["gout"], 5, 1)), Err(Error::UnknownDisease("gout".into())));
}

#[test]
fn jsonl_round_trip_and_masking() {
    let kb = fixture::knowledge_base();
    let mut cases = generate_dataset(&kb, &DatasetConfig::new([fixture::APPENDICITIS], 20, 7)).unwrap();
    let mut buf = Vec::new();
    write_cases(&mut buf, &cases).unwrap();
    assert_eq!(read_cases(&buf[..]).unwrap(), cases);

    let before = cases.clone();
    mask_findings(&mut cases, 0.5, 9);
    let mut masked = before.clone();
    mask_findings(&mut masked, 0.5, 9);
    assert_eq!(cases, masked);
    let unknown: usize =
        cases.iter().map(|c| c.findings.values.values().filter(|v| **v == Finding::Unknown).count()).sum();
    let total: usize = cases.iter().map(|c| c.findings.values.len()).sum();
    assert!(unknown > total / 3 && unknown < 2 * total / 3);
    mask_findings(&mut masked, 0.0, 9);
    assert_eq!(cases, masked);
}

#[test]
fn fixture_external_rates_follow_the_patient() {
    let kb = fixture::knowledge_base();
    let young = base_rates(&kb, &PatientContext::new(12.0, Sex::Male));
    let old = base_rates(&kb, &PatientContext::new(55.0, Sex::Female));
    assert!(kb.symptom_ids().all(|s| (0.0..=1.0).contains(&young.get(s))));
    assert!(kb.symptom_ids().any(|s| young.get(s) != old.get(s)));
}
