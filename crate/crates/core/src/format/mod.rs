//! The `.pkb` text format: parser with located diagnostics, canonical
//! serializer and JSON export.
//!
//! ```text
//! symptom nausea {
//!   label "Nausea"
//!   base male { (0, 0.1) }
//!   base female { (0, 0.1) (120, 0.2) }
//! }
//!
//! disease d {
//!   prior male { (0, 0.2) }
//!   prior female { (0, 0.2) }
//!   pathstate gi {
//!     link { (0, 0.8) }
//!     symptom nausea {
//!       link { (0, 0.5) (24, 0.9) }
//!     }
//!   }
//! }
//!
//! utilities {
//!   d { symptomatic 3 operation 5.5 }
//! }
//! ```

mod diag;
mod json;
mod lexer;
mod parser;
mod serialize;

pub use diag::{ParseDiagnostic, Severity, SourceSpan};
pub use json::export_json;
pub use parser::{parse_kb, parse_kb_bytes, ParsedKb};
pub use serialize::serialize_kb;
