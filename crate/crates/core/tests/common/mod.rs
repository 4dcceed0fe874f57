//! Random trees, curves and finding sets shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use pathstate_core::kb::BaseRates;
use pathstate_core::{CausalNode, Finding, FindingSet, TimeCurve};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Probability with extra mass on the boundary values.
pub fn prob(rng: &mut impl Rng) -> f64 {
    match rng.random_range(0..20) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random(),
    }
}

/// One to three breakpoints with increasing times in `[0, 132]`.
pub fn time_curve(rng: &mut impl Rng) -> TimeCurve {
    let n = rng.random_range(1..=3);
    let mut xs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..132.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    TimeCurve::new(xs.into_iter().map(|x| (x, prob(rng))))
}

pub struct RandomTree {
    pub tree: CausalNode,
    pub symptoms: Vec<String>,
    pub rates: BaseRates,
}

/// Tree of depth at most `max_depth` with at most `max_symptoms` leaves. The
/// link and external-cause count stays within the enumeration limit.
pub fn random_tree(rng: &mut impl Rng, max_depth: usize, max_symptoms: usize) -> RandomTree {
    struct Budget {
        symptoms: usize,
        links: usize,
        next_id: usize,
        names: Vec<String>,
    }
    fn grow(
        rng: &mut impl Rng,
        node: &mut CausalNode,
        depth: usize,
        max_depth: usize,
        b: &mut Budget,
        max_symptoms: usize,
    ) {
        let children = rng.random_range(1..=3);
        for _ in 0..children {
            // links + externals must stay within 20 with room for leaves
            if b.symptoms >= max_symptoms || b.links + b.symptoms + 2 > 20 {
                return;
            }
            b.links += 1;
            let pathstate = depth < max_depth && rng.random_bool(0.45);
            if pathstate {
                b.next_id += 1;
                let mut child = CausalNode::pathstate(format!("p{}", b.next_id));
                grow(rng, &mut child, depth + 1, max_depth, b, max_symptoms);
                node.children.push(pathstate_core::Edge { link: time_curve(rng), child });
            } else {
                let id = format!("s{}", b.symptoms);
                b.symptoms += 1;
                b.names.push(id.clone());
                node.children.push(pathstate_core::Edge { link: time_curve(rng), child: CausalNode::symptom(id) });
            }
        }
    }
    let mut tree = CausalNode::root("d");
    let mut b = Budget { symptoms: 0, links: 0, next_id: 0, names: Vec::new() };
    grow(rng, &mut tree, 1, max_depth, &mut b, max_symptoms);
    let rates: HashMap<String, f64> = b
        .names
        .iter()
        .map(|s| (s.clone(), if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..0.5) }))
        .collect();
    RandomTree { tree, symptoms: b.names, rates: BaseRates::from_map(rates) }
}

/// Each symptom present, absent or unknown with equal chance.
pub fn random_findings(rng: &mut impl Rng, symptoms: &[String], t: f64) -> FindingSet {
    let mut f = FindingSet::new(t);
    for s in symptoms {
        let v = match rng.random_range(0..3) {
            0 => Finding::Present,
            1 => Finding::Absent,
            _ => Finding::Unknown,
        };
        f.set(s.clone(), v);
    }
    f
}

/// Every fully specified present/absent assignment of `symptoms`.
pub fn all_configurations(symptoms: &[String], t: f64) -> impl Iterator<Item = FindingSet> + '_ {
    (0..1usize << symptoms.len()).map(move |mask| {
        let mut f = FindingSet::new(t);
        for (i, s) in symptoms.iter().enumerate() {
            f.set(s.clone(), if mask >> i & 1 == 1 { Finding::Present } else { Finding::Absent });
        }
        f
    })
}

/// The two-symptom shared-pathstate tree: disease -p-> x, x -q-> s1, x -r-> s2.
pub fn pqr_tree(p: f64, q: f64, r: f64) -> CausalNode {
    CausalNode::root("d").with(
        TimeCurve::constant(p),
        CausalNode::pathstate("x")
            .with(TimeCurve::constant(q), CausalNode::symptom("s1"))
            .with(TimeCurve::constant(r), CausalNode::symptom("s2")),
    )
}

/// Compare `actual` with the frozen file under `tests/golden/`. Setting
/// `PATHSTATE_BLESS=1` rewrites the file instead.
pub fn assert_golden(name: &str, actual: &str) {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("PATHSTATE_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}; run with PATHSTATE_BLESS=1 to create it", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}
