//! Request handling for the JSON API, independent of any HTTP server.
//!
//! [`Service::handle`] maps `(method, path, body)` to `(status, JSON body)`.
//! Malformed JSON and schema violations are 400 with a line and column,
//! domain errors are 422.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::decision::{assess, TreatmentAssessment};
use crate::error::{Error, Result};
use crate::format::export_json;
use crate::inference::{
    coherency_report, posterior_with_priors, two_time_posterior_with_priors, Decomposition, Finding, FindingSet,
};
use crate::kb::{eval_priors, KnowledgeBase, PatientContext, Priors, Sex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatientInput {
    pub age: f64,
    pub sex: Sex,
    #[serde(default)]
    pub cycle_day: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FindingInput {
    pub symptom_id: String,
    pub value: Finding,
    /// Hours since onset; defaults to the request's `onset_time`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecondMeasurement {
    pub time: f64,
    #[serde(default)]
    pub findings: Vec<FindingInput>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InferRequest {
    pub patient: PatientInput,
    /// Hours since the first observed symptom at consultation.
    #[serde(default)]
    pub onset_time: f64,
    #[serde(default)]
    pub findings: Vec<FindingInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<SecondMeasurement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors_override: Option<IndexMap<String, f64>>,
    /// Disease for the switching threshold; defaults to the first disease.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InferResponse {
    pub measurement_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_measurement_time: Option<f64>,
    pub posteriors: IndexMap<String, f64>,
    pub decomposition: IndexMap<String, Decomposition>,
    /// Normalized priors actually used.
    pub effective_priors: IndexMap<String, f64>,
    pub treatment: TreatmentAssessment,
}

fn time_ok(t: f64, what: &str) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidFindings(format!("{what} {t} must be a finite number >= 0")))
    }
}

/// Run inference and the treatment decision for one request.
///
/// Findings are grouped by measurement time. One distinct time gives the
/// single-time posterior, two give the two-time posterior.
pub fn handle_infer(kb: &KnowledgeBase, req: &InferRequest) -> Result<InferResponse> {
    time_ok(req.onset_time, "onset_time")?;
    let patient = PatientContext {
        age: req.patient.age,
        sex: req.patient.sex,
        cycle_day: req.patient.cycle_day,
        onset_time: req.onset_time,
    };
    patient.check().map_err(Error::InvalidPatient)?;

    let mut groups: BTreeMap<u64, FindingSet> = BTreeMap::new();
    let mut add = |t: f64, f: &FindingInput| -> Result<()> {
        time_ok(t, "finding time")?;
        // `+ 0.0` folds -0.0 into 0.0 so equal times share a key
        let set = groups.entry((t + 0.0).to_bits()).or_insert_with(|| FindingSet::new(t));
        if let Some(prev) = set.values.get(&f.symptom_id) {
            if *prev != f.value {
                return Err(Error::InvalidFindings(format!(
                    "symptom `{}` given twice at t = {t} h with different values",
                    f.symptom_id
                )));
            }
        }
        set.set(f.symptom_id.clone(), f.value);
        Ok(())
    };
    for f in &req.findings {
        add(f.time.unwrap_or(req.onset_time), f)?;
    }
    if let Some(second) = &req.second {
        time_ok(second.time, "second measurement time")?;
        for f in &second.findings {
            add(second.time, f)?;
        }
        groups.entry((second.time + 0.0).to_bits()).or_insert_with(|| FindingSet::new(second.time));
    }
    if groups.is_empty() {
        groups.insert(req.onset_time.to_bits(), FindingSet::new(req.onset_time));
    }

    let priors: Priors = match &req.priors_override {
        Some(p) => p.clone(),
        None => eval_priors(kb, &patient)?,
    };
    let mut sets: Vec<FindingSet> = groups.into_values().collect();
    sets.sort_by(|a, b| a.measurement_time.total_cmp(&b.measurement_time));
    let report = match sets.as_slice() {
        [one] => posterior_with_priors(kb, &priors, &patient, one)?,
        [first, second] => two_time_posterior_with_priors(kb, &priors, &patient, first, second)?,
        _ => {
            return Err(Error::InvalidFindings(format!(
                "findings span {} distinct times; at most two measurements are supported",
                sets.len()
            )))
        }
    };
    let target = match &req.target {
        Some(t) => t.clone(),
        None => kb.diseases.first().map(|d| d.id.clone()).ok_or(Error::UnknownDisease(String::new()))?,
    };
    if kb.disease(&target).is_none() {
        return Err(Error::UnknownDisease(target));
    }
    let treatment = assess(&report.posteriors, &kb.utilities, &target)?;
    let effective_priors = report.decomposition.iter().map(|(id, d)| (id.clone(), d.prior)).collect();
    Ok(InferResponse {
        measurement_time: report.measurement_time,
        second_measurement_time: report.second_measurement_time,
        posteriors: report.posteriors,
        decomposition: report.decomposition,
        effective_priors,
        treatment,
    })
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherencyRequest {
    pub disease: String,
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

pub fn default_grid() -> Vec<f64> {
    vec![0.0, 24.0, 72.0, 132.0]
}

pub fn default_tol() -> f64 {
    0.05
}

/// Status code and JSON body of a response.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub status: u16,
    pub body: Value,
}

impl Response {
    fn ok(body: Value) -> Self {
        Self { status: 200, body }
    }

    fn error(status: u16, kind: &str, message: impl Into<String>) -> Self {
        Self { status, body: json!({"error": {"kind": kind, "message": message.into()}}) }
    }

    fn domain(e: Error) -> Self {
        Self::error(422, "domain", e.to_string())
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> std::result::Result<T, Response> {
    serde_json::from_slice(body).map_err(|e| {
        let kind = match e.classify() {
            serde_json::error::Category::Data => "schema",
            _ => "malformed_json",
        };
        Response {
            status: 400,
            body: json!({"error": {
                "kind": kind,
                "message": e.to_string(),
                "line": e.line(),
                "column": e.column(),
            }}),
        }
    })
}

/// The JSON API over one immutable knowledge base.
#[derive(Debug, Clone)]
pub struct Service {
    kb: KnowledgeBase,
    kb_json: Value,
}

const ROUTES: [(&str, &str); 5] =
    [("GET", "/health"), ("GET", "/kb"), ("GET", "/diseases"), ("POST", "/infer"), ("POST", "/coherency")];

impl Service {
    pub fn new(kb: KnowledgeBase) -> Self {
        let kb_json = export_json(&kb);
        Self { kb, kb_json }
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn handle(&self, method: &str, path: &str, body: &[u8]) -> Response {
        let path = path.split('?').next().unwrap_or(path);
        match (method, path) {
            ("GET", "/health") => Response::ok(json!({"status": "ok"})),
            ("GET", "/kb") => Response::ok(self.kb_json.clone()),
            ("GET", "/diseases") => Response::ok(Value::Array(
                self.kb
                    .diseases
                    .iter()
                    .map(|d| {
                        json!({
                            "id": d.id,
                            "label": d.label,
                            "female_only": !d.applies_to(Sex::Male),
                        })
                    })
                    .collect(),
            )),
            ("POST", "/infer") => match parse_body::<InferRequest>(body) {
                Ok(req) => match handle_infer(&self.kb, &req) {
                    Ok(resp) => Response::ok(serde_json::to_value(resp).unwrap_or(Value::Null)),
                    Err(e) => Response::domain(e),
                },
                Err(r) => r,
            },
            ("POST", "/coherency") => match parse_body::<CoherencyRequest>(body) {
                Ok(req) => match coherency_report(&self.kb, &req.disease, &req.grid, req.tol) {
                    Ok(rows) => Response::ok(json!({"disease": req.disease, "tol": req.tol, "rows": rows})),
                    Err(e) => Response::domain(e),
                },
                Err(r) => r,
            },
            _ if ROUTES.iter().any(|r| r.1 == path) => {
                Response::error(405, "method_not_allowed", format!("{method} is not allowed on {path}"))
            }
            _ => Response::error(404, "not_found", format!("no route for {path}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;

    fn service() -> Service {
        Service::new(fixture::knowledge_base())
    }

    fn infer(s: &Service, body: Value) -> Response {
        s.handle("POST", "/infer", body.to_string().as_bytes())
    }

    #[test]
    fn empty_findings_give_priors() {
        let s = service();
        let r = infer(&s, json!({"patient": {"age": 30, "sex": "male"}, "onset_time": 12}));
        assert_eq!(r.status, 200, "{}", r.body);
        let priors = eval_priors(s.kb(), &PatientContext::new(30.0, Sex::Male)).unwrap();
        for (id, p) in &priors {
            assert!((r.body["posteriors"][id].as_f64().unwrap() - p).abs() < 1e-15);
        }
    }

    #[test]
    fn two_times_use_the_temporal_model() {
        let s = service();
        let r = infer(
            &s,
            json!({
                "patient": {"age": 30, "sex": "female", "cycle_day": 14},
                "onset_time": 6,
                "findings": [{"symptom_id": "nausea", "value": "present"}],
                "second": {"time": 30, "findings": [{"symptom_id": "tenderness", "value": "present"}]},
            }),
        );
        assert_eq!(r.status, 200, "{}", r.body);
        assert_eq!(r.body["second_measurement_time"], json!(30.0));
    }

    #[test]
    fn three_times_are_rejected() {
        let s = service();
        let r = infer(
            &s,
            json!({
                "patient": {"age": 30, "sex": "male"},
                "findings": [
                    {"symptom_id": "nausea", "value": "present", "time": 1},
                    {"symptom_id": "fever", "value": "present", "time": 2},
                    {"symptom_id": "ileus", "value": "absent", "time": 3},
                ],
            }),
        );
        assert_eq!(r.status, 422);
    }

    #[test]
    fn error_statuses() {
        let s = service();
        let r = s.handle("POST", "/infer", b"{\n  \"patient\": ");
        assert_eq!(r.status, 400);
        assert_eq!(r.body["error"]["line"], json!(2));
        let r = s.handle("POST", "/infer", br#"{"patient": {"age": 3, "sex": "robot"}}"#);
        assert_eq!((r.status, r.body["error"]["kind"].as_str()), (400, Some("schema")));
        let r = infer(
            &s,
            json!({"patient": {"age": 30, "sex": "male"}, "findings": [{"symptom_id": "zzz", "value": "present"}]}),
        );
        assert_eq!(r.status, 422);
        assert_eq!(s.handle("GET", "/infer", b"").status, 405);
        assert_eq!(s.handle("GET", "/nope", b"").status, 404);
    }

    #[test]
    fn coherency_endpoint() {
        let s = service();
        let r = s.handle("POST", "/coherency", br#"{"disease": "appendicitis"}"#);
        assert_eq!(r.status, 200);
        assert!(!r.body["rows"].as_array().unwrap().is_empty());
        let r = s.handle("POST", "/coherency", br#"{"disease": "nope"}"#);
        assert_eq!(r.status, 422);
    }
}
