//! Recursive-descent parser for `.pkb` documents.
//!
//! Syntax errors abort the current top-level declaration and parsing resumes
//! at the next one. Once the document is syntactically clean the resulting
//! knowledge base goes through [`validate_kb`], and every issue is reported at
//! the source span of the item it names.

use std::collections::HashMap;

use indexmap::IndexMap;

use super::diag::{LineIndex, ParseDiagnostic, Severity};
use super::lexer::{lex, Tok, Token};
use crate::curve::{AgeCurve, Breakpoints, CurveIssue, CycleCurve, Point, TimeCurve};
use crate::kb::{
    validate_kb, CausalNode, DiseaseDef, Edge, IssueSeverity, KnowledgeBase, Morbidity, Sex, SexRestriction, SymptomDef,
};

/// Nesting limit for pathstate blocks.
const MAX_DEPTH: usize = 128;

/// A successfully parsed document with any non-fatal warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedKb {
    pub kb: KnowledgeBase,
    pub warnings: Vec<ParseDiagnostic>,
}

type Range = (usize, usize);

#[derive(Debug, Clone, Default)]
struct Spans {
    whole: Range,
    /// (x, y) spans of each curve point.
    points: Vec<(Range, Range)>,
}

struct Bail;

type PResult<T> = Result<T, Bail>;

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    depth: usize,
    errors: Vec<(String, usize, usize)>,
    spans: HashMap<(String, String), Spans>,
}

const TOP_LEVEL: [&str; 5] = ["name", "version", "symptom", "disease", "utilities"];

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> &'t Token {
        let t = self.peek();
        match t.tok {
            Tok::LBrace => self.depth += 1,
            Tok::RBrace => self.depth = self.depth.saturating_sub(1),
            _ => {}
        }
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&mut self, msg: impl Into<String>, at: &Token) -> PResult<T> {
        self.errors.push((msg.into(), at.start, at.end));
        Err(Bail)
    }

    fn error(&mut self, msg: impl Into<String>, range: Range) {
        self.errors.push((msg.into(), range.0, range.1));
    }

    fn expect(&mut self, want: Tok, what: &str) -> PResult<&'t Token> {
        let t = self.peek();
        if std::mem::discriminant(&t.tok) == std::mem::discriminant(&want) {
            Ok(self.bump())
        } else {
            self.fail(format!("expected {what}, found {}", t.tok.describe()), t)
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Range)> {
        let t = self.peek();
        match &t.tok {
            Tok::Ident(s) => {
                self.bump();
                Ok((s.clone(), (t.start, t.end)))
            }
            other => self.fail(format!("expected {what}, found {}", other.describe()), t),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        let t = self.peek();
        match &t.tok {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            other => self.fail(format!("expected `{kw}`, found {}", other.describe()), t),
        }
    }

    fn number(&mut self) -> PResult<(f64, Range)> {
        let t = self.peek();
        match t.tok {
            Tok::Number(v) => {
                self.bump();
                Ok((v, (t.start, t.end)))
            }
            ref other => self.fail(format!("expected a number, found {}", other.describe()), t),
        }
    }

    fn string(&mut self) -> PResult<String> {
        let t = self.peek();
        match &t.tok {
            Tok::Str(s) => {
                self.bump();
                Ok(s.clone())
            }
            other => self.fail(format!("expected a string, found {}", other.describe()), t),
        }
    }

    fn sex(&mut self) -> PResult<Sex> {
        let t = self.peek();
        match &t.tok {
            Tok::Ident(s) if Sex::parse(s).is_some() => {
                self.bump();
                Ok(Sex::parse(s).unwrap_or(Sex::Male))
            }
            other => self.fail(format!("expected `male` or `female`, found {}", other.describe()), t),
        }
    }

    fn at_rbrace(&self) -> bool {
        self.peek().tok == Tok::RBrace
    }

    fn register(&mut self, loc: &str, field: &str, spans: Spans) {
        self.spans.insert((loc.to_string(), field.to_string()), spans);
    }

    fn register_range(&mut self, loc: &str, field: &str, whole: Range) {
        self.register(loc, field, Spans { whole, points: Vec::new() });
    }

    /// `{ (x, y) (x, y) ... }`
    fn curve(&mut self) -> PResult<(Breakpoints, Spans)> {
        let open = self.expect(Tok::LBrace, "`{` to start a curve")?;
        let mut points = Vec::new();
        let mut spans = Vec::new();
        while !self.at_rbrace() {
            self.expect(Tok::LParen, "`(` or `}`")?;
            let (x, xs) = self.number()?;
            self.expect(Tok::Comma, "`,`")?;
            let (y, ys) = self.number()?;
            self.expect(Tok::RParen, "`)`")?;
            points.push(Point::new(x, y));
            spans.push((xs, ys));
        }
        let close = self.bump();
        Ok((Breakpoints(points), Spans { whole: (open.start, close.end), points: spans }))
    }

    fn document(&mut self, kb: &mut KnowledgeBase) {
        let mut seen_meta: HashMap<&str, Range> = HashMap::new();
        loop {
            let t = self.peek();
            let result = match &t.tok {
                Tok::Eof => break,
                Tok::Ident(kw) if kw == "name" || kw == "version" => {
                    self.bump();
                    let key = if kw == "name" { "name" } else { "version" };
                    if seen_meta.insert(key, (t.start, t.end)).is_some() {
                        self.error(format!("duplicate `{key}`"), (t.start, t.end));
                    }
                    self.string().map(|s| if key == "name" { kb.metadata.name = s } else { kb.metadata.version = s })
                }
                Tok::Ident(kw) if kw == "symptom" => self.symptom().map(|s| kb.symptoms.push(s)),
                Tok::Ident(kw) if kw == "disease" => self.disease().map(|d| kb.diseases.push(d)),
                Tok::Ident(kw) if kw == "utilities" => self.utilities(kb),
                other => {
                    let msg = format!(
                        "expected `symptom`, `disease`, `utilities`, `name` or `version`, found {}",
                        other.describe()
                    );
                    self.error(msg, (t.start, t.end));
                    self.bump();
                    Err(Bail)
                }
            };
            if result.is_err() {
                self.recover();
            }
        }
    }

    fn recover(&mut self) {
        loop {
            let t = self.peek();
            match &t.tok {
                Tok::Eof => return,
                Tok::Ident(kw) if self.depth == 0 && TOP_LEVEL.contains(&kw.as_str()) => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn symptom(&mut self) -> PResult<SymptomDef> {
        self.keyword("symptom")?;
        let (id, id_span) = self.ident("a symptom id")?;
        let loc = format!("symptom {id}");
        self.register_range(&loc, "", id_span);
        self.register_range(&loc, "id", id_span);
        self.expect(Tok::LBrace, "`{`")?;
        let mut label = None;
        let mut base_rate = IndexMap::new();
        while !self.at_rbrace() {
            let (kw, kw_span) = self.ident("`label`, `base` or `}`")?;
            match kw.as_str() {
                "label" => {
                    let s = self.string()?;
                    if label.replace(s).is_some() {
                        self.error("duplicate `label`", kw_span);
                    }
                }
                "base" => {
                    let sex = self.sex()?;
                    let (curve, spans) = self.curve()?;
                    self.register(&loc, &format!("base {sex}"), spans);
                    if base_rate.insert(sex, AgeCurve(curve)).is_some() {
                        self.error(format!("duplicate `base {sex}`"), kw_span);
                    }
                }
                other => {
                    self.error(format!("unknown symptom field `{other}`"), kw_span);
                    return Err(Bail);
                }
            }
        }
        self.bump();
        Ok(SymptomDef { label: label.unwrap_or_else(|| id.clone()), id, base_rate })
    }

    fn disease(&mut self) -> PResult<DiseaseDef> {
        self.keyword("disease")?;
        let (id, id_span) = self.ident("a disease id")?;
        let loc = format!("disease {id}");
        for field in ["", "id", "tree"] {
            self.register_range(&loc, field, id_span);
        }
        self.expect(Tok::LBrace, "`{`")?;
        let mut d = DiseaseDef {
            id: id.clone(),
            label: String::new(),
            restriction: SexRestriction::Any,
            prior_age: IndexMap::new(),
            cycle_weight: None,
            tree: CausalNode::root(id.clone()),
            direct_likelihoods: IndexMap::new(),
        };
        let mut label = None;
        while !self.at_rbrace() {
            let t = self.peek();
            let kw_span = (t.start, t.end);
            let kw = match &t.tok {
                Tok::Ident(s) => s.as_str(),
                other => return self.fail(format!("expected a disease field or `}}`, found {}", other.describe()), t),
            };
            match kw {
                "pathstate" | "symptom" => {
                    let index = d.tree.children.len();
                    let edge = self.node(&loc, index, 1)?;
                    d.tree.children.push(edge);
                }
                "label" => {
                    self.bump();
                    let s = self.string()?;
                    if label.replace(s).is_some() {
                        self.error("duplicate `label`", kw_span);
                    }
                }
                "female_only" => {
                    self.bump();
                    if d.restriction == SexRestriction::FemaleOnly {
                        self.error("duplicate `female_only`", kw_span);
                    }
                    d.restriction = SexRestriction::FemaleOnly;
                }
                "prior" => {
                    self.bump();
                    let sex = self.sex()?;
                    let (curve, spans) = self.curve()?;
                    self.register(&loc, &format!("prior {sex}"), spans);
                    if d.prior_age.insert(sex, AgeCurve(curve)).is_some() {
                        self.error(format!("duplicate `prior {sex}`"), kw_span);
                    }
                }
                "cycle" => {
                    self.bump();
                    let (curve, spans) = self.curve()?;
                    self.register(&loc, "cycle", spans);
                    if d.cycle_weight.replace(CycleCurve(curve)).is_some() {
                        self.error("duplicate `cycle`", kw_span);
                    }
                }
                "direct" => {
                    self.bump();
                    let (sid, sid_span) = self.ident("a symptom id")?;
                    let (curve, mut spans) = self.curve()?;
                    spans.whole = sid_span;
                    self.register(&loc, &format!("direct {sid}"), spans);
                    if d.direct_likelihoods.insert(sid.clone(), TimeCurve(curve)).is_some() {
                        self.error(format!("duplicate `direct {sid}`"), kw_span);
                    }
                }
                other => {
                    let msg = format!("unknown disease field `{other}`");
                    self.error(msg, kw_span);
                    return Err(Bail);
                }
            }
        }
        self.bump();
        d.label = label.unwrap_or_else(|| id.clone());
        Ok(d)
    }

    /// `pathstate ID { link CURVE node* }` or `symptom ID { link CURVE }`
    fn node(&mut self, parent_loc: &str, index: usize, nesting: usize) -> PResult<Edge> {
        let (kw, kw_span) = self.ident("`pathstate` or `symptom`")?;
        if nesting > MAX_DEPTH {
            self.error(format!("pathstates nested deeper than {MAX_DEPTH}"), kw_span);
            return Err(Bail);
        }
        let (id, id_span) = self.ident("a node id")?;
        let mut child = match kw.as_str() {
            "symptom" => CausalNode::symptom(id.clone()),
            _ => CausalNode::pathstate(id.clone()),
        };
        let loc = format!("{parent_loc}/{id}");
        self.register_range(&loc, "", id_span);
        self.expect(Tok::LBrace, "`{`")?;
        self.keyword("link")?;
        let (curve, spans) = self.curve()?;
        self.register(&loc, &format!("link (child {index})"), spans);
        while !self.at_rbrace() {
            let t = self.peek();
            match &t.tok {
                Tok::Ident(s) if s == "pathstate" || s == "symptom" => {
                    let i = child.children.len();
                    let edge = self.node(&loc, i, nesting + 1)?;
                    child.children.push(edge);
                }
                other => {
                    return self.fail(format!("expected `pathstate`, `symptom` or `}}`, found {}", other.describe()), t)
                }
            }
        }
        self.bump();
        Ok(Edge { link: TimeCurve(curve), child })
    }

    fn utilities(&mut self, kb: &mut KnowledgeBase) -> PResult<()> {
        self.keyword("utilities")?;
        self.expect(Tok::LBrace, "`{`")?;
        while !self.at_rbrace() {
            let (id, id_span) = self.ident("a disease id or `}`")?;
            let loc = format!("utilities {id}");
            self.register_range(&loc, "", id_span);
            self.expect(Tok::LBrace, "`{`")?;
            let (mut symptomatic, mut operation) = (None, None);
            while !self.at_rbrace() {
                let (field, field_span) = self.ident("`symptomatic`, `operation` or `}`")?;
                let slot = match field.as_str() {
                    "symptomatic" => &mut symptomatic,
                    "operation" => &mut operation,
                    other => {
                        self.error(format!("unknown treatment `{other}`"), field_span);
                        return Err(Bail);
                    }
                };
                let was_set = slot.is_some();
                let (v, v_span) = self.number()?;
                match field.as_str() {
                    "symptomatic" => symptomatic = Some(v),
                    _ => operation = Some(v),
                }
                self.register_range(&loc, &field, v_span);
                if was_set {
                    self.error(format!("duplicate `{field}`"), field_span);
                }
            }
            self.bump();
            match (symptomatic, operation) {
                (Some(s), Some(o)) => {
                    if kb.utilities.morbidity.insert(id.clone(), Morbidity::new(s, o)).is_some() {
                        self.error(format!("duplicate utilities for `{id}`"), id_span);
                    }
                }
                _ => self.error(format!("utilities for `{id}` need both `symptomatic` and `operation`"), id_span),
            }
        }
        self.bump();
        Ok(())
    }

    /// Source range for a validation issue.
    fn locate(&self, location: &str, field: &str, curve_issue: Option<&CurveIssue>) -> Range {
        let get = |l: &str, f: &str| self.spans.get(&(l.to_string(), f.to_string()));
        if let Some(spans) = get(location, field) {
            let point = match curve_issue {
                Some(CurveIssue::XOutOfDomain { index, .. }) | Some(CurveIssue::NotIncreasing { index, .. }) => {
                    spans.points.get(*index).map(|p| p.0)
                }
                Some(CurveIssue::YOutOfRange { index, .. }) => spans.points.get(*index).map(|p| p.1),
                _ => None,
            };
            return point.unwrap_or(spans.whole);
        }
        if let Some(spans) = get(location, "") {
            return spans.whole;
        }
        if let Some(disease) = location.strip_prefix("utilities ") {
            if let Some(spans) = get(&format!("disease {disease}"), "") {
                return spans.whole;
            }
        }
        (0, 0)
    }
}

/// Parse a `.pkb` document from raw bytes; invalid UTF-8 is reported as a
/// diagnostic.
pub fn parse_kb_bytes(bytes: &[u8]) -> Result<ParsedKb, Vec<ParseDiagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_kb(text),
        Err(e) => {
            let valid = e.valid_up_to();
            let text = std::str::from_utf8(&bytes[..valid]).unwrap_or("");
            let idx = LineIndex::new(text);
            Err(vec![ParseDiagnostic {
                severity: Severity::Error,
                message: format!("invalid UTF-8 at byte {valid}"),
                span: idx.span(valid, valid),
            }])
        }
    }
}

pub fn parse_kb(text: &str) -> Result<ParsedKb, Vec<ParseDiagnostic>> {
    let idx = LineIndex::new(text);
    let diag = |severity, message: String, (start, end): Range| ParseDiagnostic {
        severity,
        message,
        span: idx.span(start, end),
    };
    let (tokens, lex_errors) = lex(text);
    let mut parser = Parser { toks: &tokens, pos: 0, depth: 0, errors: Vec::new(), spans: HashMap::new() };
    let mut kb = KnowledgeBase::default();
    parser.document(&mut kb);

    let mut errors: Vec<(String, usize, usize)> = lex_errors;
    errors.append(&mut parser.errors);
    if !errors.is_empty() {
        errors.sort_by_key(|e| (e.1, e.2));
        return Err(errors.into_iter().map(|(m, s, e)| diag(Severity::Error, m, (s, e))).collect());
    }

    let report = validate_kb(&kb);
    let mut out_errors = Vec::new();
    let mut warnings = Vec::new();
    for issue in &report.issues {
        let range = parser.locate(&issue.location, &issue.field, issue.curve_issue.as_ref());
        let message = if issue.field.is_empty() {
            format!("{}: {}", issue.location, issue.message)
        } else {
            format!("{} [{}]: {}", issue.location, issue.field, issue.message)
        };
        match issue.severity {
            IssueSeverity::Error => out_errors.push(diag(Severity::Error, message, range)),
            IssueSeverity::Warning => warnings.push(diag(Severity::Warning, message, range)),
        }
    }
    if out_errors.is_empty() {
        Ok(ParsedKb { kb, warnings })
    } else {
        out_errors.extend(warnings);
        Err(out_errors)
    }
}
