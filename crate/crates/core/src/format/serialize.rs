use std::fmt::Write;

use crate::curve::Point;
use crate::kb::{CausalNode, KnowledgeBase, Sex, SexRestriction};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// `f64`'s `Display` is the shortest string that reads back to the same value
/// and never uses an exponent.
fn curve(points: &[Point]) -> String {
    let mut s = String::from("{");
    for p in points {
        let _ = write!(s, " ({}, {})", p.x, p.y);
    }
    s.push_str(" }");
    s
}

fn node(out: &mut String, n: &CausalNode, link: &[Point], indent: usize) {
    let pad = "  ".repeat(indent);
    let kw = if n.is_symptom() { "symptom" } else { "pathstate" };
    let _ = writeln!(out, "{pad}{kw} {} {{", n.id);
    let _ = writeln!(out, "{pad}  link {}", curve(link));
    for e in &n.children {
        node(out, &e.child, e.link.points(), indent + 1);
    }
    let _ = writeln!(out, "{pad}}}");
}

/// Canonical `.pkb` text for a knowledge base.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    let mut blocks: Vec<String> = Vec::new();

    let mut meta = String::new();
    if !kb.metadata.name.is_empty() {
        let _ = writeln!(meta, "name {}", quote(&kb.metadata.name));
    }
    if !kb.metadata.version.is_empty() {
        let _ = writeln!(meta, "version {}", quote(&kb.metadata.version));
    }
    if !meta.is_empty() {
        blocks.push(meta);
    }

    for s in &kb.symptoms {
        let mut b = String::new();
        let _ = writeln!(b, "symptom {} {{", s.id);
        let _ = writeln!(b, "  label {}", quote(&s.label));
        for sex in Sex::ALL {
            if let Some(c) = s.base_rate.get(&sex) {
                let _ = writeln!(b, "  base {sex} {}", curve(c.points()));
            }
        }
        b.push_str("}\n");
        blocks.push(b);
    }

    for d in &kb.diseases {
        let mut b = String::new();
        let _ = writeln!(b, "disease {} {{", d.id);
        let _ = writeln!(b, "  label {}", quote(&d.label));
        if d.restriction == SexRestriction::FemaleOnly {
            b.push_str("  female_only\n");
        }
        for sex in Sex::ALL {
            if let Some(c) = d.prior_age.get(&sex) {
                let _ = writeln!(b, "  prior {sex} {}", curve(c.points()));
            }
        }
        if let Some(c) = &d.cycle_weight {
            let _ = writeln!(b, "  cycle {}", curve(c.points()));
        }
        for e in &d.tree.children {
            node(&mut b, &e.child, e.link.points(), 1);
        }
        for (sid, c) in &d.direct_likelihoods {
            let _ = writeln!(b, "  direct {sid} {}", curve(c.points()));
        }
        b.push_str("}\n");
        blocks.push(b);
    }

    if !kb.utilities.morbidity.is_empty() {
        let mut b = String::from("utilities {\n");
        for (id, m) in &kb.utilities.morbidity {
            let _ = writeln!(b, "  {id} {{ symptomatic {} operation {} }}", m.symptomatic, m.operation);
        }
        b.push_str("}\n");
        blocks.push(b);
    }

    for (i, b) in blocks.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(b);
    }
    out
}
