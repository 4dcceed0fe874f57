//! Causal Bayesian diagnosis over trees of intermediate pathological states.
//!
//! Diseases are modelled as trees whose internal nodes ("pathstates") make
//! intercorrelated symptoms conditionally independent. Link strengths depend on
//! the time since onset, symptoms may also arise from causes outside the
//! hypothesis pool, and the resulting posteriors drive a treatment choice that
//! minimizes expected hospital days.
//!
//! * [`kb`]: domain model, validation, patient-conditioned priors
//! * [`format`]: `.pkb` text format, canonical serializer, JSON export
//! * [`inference`]: likelihood recursion, posteriors, coherency, two-time patterns
//! * [`decision`]: expected morbidity and treatment recommendation
//! * [`simulate`]: forward sampling and exact enumeration
//! * [`evaluation`]: independence baseline and calibration statistics
//! * [`service`]: request/response types and the JSON API router

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod decision;
pub mod error;
pub mod evaluation;
pub mod fixture;
pub mod format;
pub mod inference;
pub mod kb;
pub mod service;
pub mod simulate;

pub use curve::{AgeCurve, CycleCurve, Point, TimeCurve};
pub use error::{Error, Result};
pub use inference::{Finding, FindingSet, PosteriorReport};
pub use kb::{
    CausalNode, DiseaseDef, Edge, KnowledgeBase, Morbidity, NodeKind, PatientContext, Sex, SymptomDef, Treatment,
    UtilityTable,
};
