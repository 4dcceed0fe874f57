//! The bundled acute-abdominal-pain knowledge base.
//!
//! Six mutually exclusive diseases, 32 pathstates and 19 symptoms.
//! Appendicitis carries the tenderness severity chain
//! `arlq -> amodrlq -> asevrlq`. The other diseases and all curves are
//! illustrative and were not elicited.

use crate::format::parse_kb;
use crate::kb::KnowledgeBase;

/// Canonical source text of the fixture.
pub const SOURCE: &str = include_str!("../fixtures/abdominal.pkb");

/// Target disease of the benchmark experiment.
pub const APPENDICITIS: &str = "appendicitis";
/// Comparison class of the benchmark experiment.
pub const NSAP: &str = "nsap";

/// Parse the bundled fixture.
pub fn knowledge_base() -> KnowledgeBase {
    match parse_kb(SOURCE) {
        Ok(parsed) => parsed.kb,
        Err(diags) => panic!("bundled fixture is invalid: {}", diags[0]),
    }
}
