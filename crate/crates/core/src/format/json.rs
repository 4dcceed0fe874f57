use serde_json::{json, Map, Value};

use crate::curve::Point;
use crate::kb::{CausalNode, KnowledgeBase, NodeKind, Sex, SexRestriction};

fn curve(points: &[Point]) -> Value {
    Value::Array(points.iter().map(|p| json!([p.x, p.y])).collect())
}

fn by_sex<'a, C: 'a>(map: &'a indexmap::IndexMap<Sex, C>, points: impl Fn(&'a C) -> &'a [Point]) -> Value {
    let mut out = Map::new();
    for sex in Sex::ALL {
        if let Some(c) = map.get(&sex) {
            out.insert(sex.as_str().into(), curve(points(c)));
        }
    }
    Value::Object(out)
}

fn node(n: &CausalNode, link: Option<&[Point]>) -> Value {
    let kind = match n.kind {
        NodeKind::DiseaseRoot => "disease",
        NodeKind::Pathstate => "pathstate",
        NodeKind::SymptomRef => "symptom",
    };
    let mut out = Map::new();
    out.insert("id".into(), n.id.clone().into());
    out.insert("kind".into(), kind.into());
    if let Some(link) = link {
        out.insert("link".into(), curve(link));
    }
    out.insert(
        "children".into(),
        Value::Array(n.children.iter().map(|e| node(&e.child, Some(e.link.points()))).collect()),
    );
    Value::Object(out)
}

/// JSON view of a knowledge base. The root node of each tree has no `link`.
pub fn export_json(kb: &KnowledgeBase) -> Value {
    let symptoms: Vec<Value> = kb
        .symptoms
        .iter()
        .map(|s| json!({"id": s.id, "label": s.label, "base": by_sex(&s.base_rate, |c| c.points())}))
        .collect();
    let diseases: Vec<Value> = kb
        .diseases
        .iter()
        .map(|d| {
            let direct: Map<String, Value> =
                d.direct_likelihoods.iter().map(|(k, c)| (k.clone(), curve(c.points()))).collect();
            json!({
                "id": d.id,
                "label": d.label,
                "female_only": d.restriction == SexRestriction::FemaleOnly,
                "prior": by_sex(&d.prior_age, |c| c.points()),
                "cycle": d.cycle_weight.as_ref().map(|c| curve(c.points())),
                "tree": node(&d.tree, None),
                "direct": direct,
            })
        })
        .collect();
    let utilities: Map<String, Value> = kb
        .utilities
        .morbidity
        .iter()
        .map(|(id, m)| (id.clone(), json!({"symptomatic": m.symptomatic, "operation": m.operation})))
        .collect();
    json!({
        "name": kb.metadata.name,
        "version": kb.metadata.version,
        "symptoms": symptoms,
        "diseases": diseases,
        "utilities": utilities,
    })
}
