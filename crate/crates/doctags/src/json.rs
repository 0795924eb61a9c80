//! Lossless JSON persistence of documents.
//!
//! ```json
//! {"schema_version": 1, "pages": [{"blocks": [{"kind": "text", "text": "hi"}]}]}
//! ```

use doctags_core::{Diagnostic, Document, Page};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::codes;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Serialize)]
struct EnvelopeRef<'a> {
    schema_version: u64,
    pages: &'a [Page],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    #[allow(dead_code)]
    schema_version: u64,
    pages: Vec<Page>,
}

pub fn to_json(doc: &Document) -> String {
    let envelope = EnvelopeRef {
        schema_version: SCHEMA_VERSION,
        pages: &doc.pages,
    };
    serde_json::to_string_pretty(&envelope).expect("documents always serialize")
}

/// Reads a document written by [`to_json`]. Unknown schema versions,
/// malformed JSON and documents that break model invariants are rejected.
pub fn from_json(s: &str) -> Result<Document, Vec<Diagnostic>> {
    let value: Value = serde_json::from_str(s).map_err(|e| vec![Diagnostic::error(codes::JSON_INVALID, e.to_string())])?;
    match value.get("schema_version") {
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(v) => {
            return Err(vec![Diagnostic::error(
                codes::SCHEMA_VERSION_UNSUPPORTED,
                format!("schema_version {v} is not supported (expected {SCHEMA_VERSION})"),
            )])
        }
        None => {
            return Err(vec![Diagnostic::error(
                codes::SCHEMA_VERSION_UNSUPPORTED,
                "missing schema_version",
            )])
        }
    }
    let envelope: Envelope =
        serde_json::from_value(value).map_err(|e| vec![Diagnostic::error(codes::JSON_INVALID, e.to_string())])?;
    let doc = Document {
        pages: envelope.pages,
    };
    let problems = doc.validate();
    if problems.is_empty() {
        Ok(doc)
    } else {
        Err(problems)
    }
}
