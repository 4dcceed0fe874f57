mod common;

use common::{assert_golden, random_tree};
use indexmap::IndexMap;
use pathstate_core::format::{export_json, parse_kb, parse_kb_bytes, serialize_kb, Severity};
use pathstate_core::kb::{validate_kb, KbMetadata, SexRestriction};
use pathstate_core::{
    fixture, AgeCurve, CycleCurve, DiseaseDef, KnowledgeBase, Morbidity, Sex, SymptomDef, UtilityTable,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

#[test]
fn fixture_json_export_is_frozen() {
    let json = serde_json::to_string_pretty(&export_json(&fixture::knowledge_base())).unwrap() + "\n";
    assert_golden("abdominal.json", &json);
}

#[test]
fn exported_symptom_references_resolve() {
    let json = export_json(&fixture::knowledge_base());
    let declared: Vec<&str> = json["symptoms"].as_array().unwrap().iter().map(|s| s["id"].as_str().unwrap()).collect();
    fn leaves<'a>(node: &'a Value, out: &mut Vec<&'a str>) {
        if node["kind"] == "symptom" {
            out.push(node["id"].as_str().unwrap());
        }
        for child in node["children"].as_array().unwrap() {
            leaves(child, out);
        }
    }
    let mut used = Vec::new();
    for d in json["diseases"].as_array().unwrap() {
        leaves(&d["tree"], &mut used);
        used.extend(d["direct"].as_object().unwrap().keys().map(String::as_str));
        assert!(d["tree"].get("link").is_none());
        assert!(json["utilities"].get(d["id"].as_str().unwrap()).is_some());
    }
    assert!(!used.is_empty());
    assert!(used.iter().all(|u| declared.contains(u)));
}

#[test]
fn fixture_is_a_serializer_fixed_point() {
    let kb = fixture::knowledge_base();
    let text = serialize_kb(&kb);
    assert_eq!(text, fixture::SOURCE);
    assert_eq!(serialize_kb(&kb), text);
    let again = parse_kb(&text).unwrap();
    assert!(again.warnings.is_empty());
    assert_eq!(again.kb, kb);
}

#[test]
fn syntax_errors_all_reported_with_lines() {
    let src = "symptom a { base male { (0, 0.1) } }\nsymptom { }\ndisease d { prior male { (0 0.1) } tree { } }\nutilities { d { symptomatic x } }\n";
    let errs = parse_kb(src).unwrap_err();
    let lines: Vec<usize> = errs.iter().filter(|d| d.is_error()).map(|d| d.span.start_line).collect();
    assert!(lines.len() >= 3, "{errs:?}");
    assert!(lines.contains(&2) && lines.contains(&3) && lines.contains(&4), "{lines:?}");
}

#[test]
fn non_utf8_input_is_located() {
    let mut bytes = b"symptom a {".to_vec();
    bytes.push(0xff);
    let errs = parse_kb_bytes(&bytes).unwrap_err();
    assert_eq!(errs.len(), 1);
    assert_eq!(errs[0].severity, Severity::Error);
    assert_eq!(errs[0].span.start, 11);
}

fn random_kb(seed: u64) -> KnowledgeBase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut symptoms: Vec<String> = Vec::new();
    let mut diseases = Vec::new();
    let n = rng.random_range(1..=4);
    for i in 0..n {
        let mut rt = random_tree(&mut rng, 3, 6);
        rt.tree.id = format!("d{i}");
        for s in &rt.symptoms {
            if !symptoms.contains(s) {
                symptoms.push(s.clone());
            }
        }
        let age = |rng: &mut ChaCha8Rng| {
            let k = rng.random_range(1..=3);
            let mut xs: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..120.0)).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            AgeCurve::new(xs.into_iter().map(|x| (x, rng.random::<f64>())))
        };
        let female_only = rng.random_bool(0.3);
        let mut prior_age = IndexMap::new();
        if !female_only {
            prior_age.insert(Sex::Male, age(&mut rng));
        }
        prior_age.insert(Sex::Female, age(&mut rng));
        let cycle_weight = (female_only && rng.random_bool(0.5))
            .then(|| CycleCurve::new([(1.0, rng.random_range(0.5..2.0)), (28.0, 1.0)]));
        let mut direct = IndexMap::new();
        for s in rt.symptoms.iter().take(2) {
            if rng.random_bool(0.5) {
                direct.insert(s.clone(), common::time_curve(&mut rng));
            }
        }
        diseases.push(DiseaseDef {
            id: format!("d{i}"),
            label: format!("Disease {i}"),
            restriction: if female_only { SexRestriction::FemaleOnly } else { SexRestriction::Any },
            prior_age,
            cycle_weight,
            tree: rt.tree,
            direct_likelihoods: direct,
        });
    }
    let symptoms = symptoms
        .into_iter()
        .map(|id| SymptomDef {
            label: format!("Symptom {id}"),
            base_rate: IndexMap::from([
                (Sex::Male, AgeCurve::constant(rng.random_range(0.0..0.3))),
                (Sex::Female, AgeCurve::new([(0.0, rng.random_range(0.0..0.3)), (80.0, rng.random_range(0.0..0.3))])),
            ]),
            id,
        })
        .collect();
    let utilities = UtilityTable {
        morbidity: diseases
            .iter()
            .map(|d| (d.id.clone(), Morbidity::new(rng.random_range(0.0..20.0), rng.random_range(0.0..20.0))))
            .collect(),
    };
    KnowledgeBase {
        metadata: KbMetadata { name: format!("random {seed}"), version: "0.1".into() },
        symptoms,
        diseases,
        utilities,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn random_knowledge_bases_round_trip(seed in any::<u64>()) {
        let kb = random_kb(seed);
        let report = validate_kb(&kb);
        prop_assert!(report.errors().next().is_none(), "{:?}", report.issues);
        let text = serialize_kb(&kb);
        let parsed = parse_kb(&text).map_err(|e| TestCaseError::fail(format!("{e:?}\n{text}")))?;
        prop_assert_eq!(&parsed.kb, &kb);
        prop_assert_eq!(serialize_kb(&parsed.kb), text);
    }

    #[test]
    fn diagnostics_stay_inside_the_input(cut in 0usize..4000, junk in "[{}()a-z0-9 .,\"\n-]{0,12}") {
        let src = fixture::SOURCE;
        let at = src.char_indices().map(|(i, _)| i).find(|&i| i >= cut.min(src.len())).unwrap_or(src.len());
        let text = format!("{}{}{}", &src[..at], junk, &src[at..]);
        if let Err(diags) = parse_kb(&text) {
            prop_assert!(diags.iter().any(|d| d.is_error()));
            for d in &diags {
                prop_assert!(d.span.start <= d.span.end && d.span.end <= text.len());
                prop_assert!(d.span.start_line >= 1 && d.span.start_column >= 1);
            }
        }
    }
}
