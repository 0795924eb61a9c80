//! Machine-readable diagnostic lines.

use std::io::{self, Write};

use doctags_core::Diagnostic;
use serde::Serialize;

#[derive(Serialize)]
struct Line<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    file: Option<&'a str>,
    #[serde(flatten)]
    diagnostic: &'a Diagnostic,
}

/// Writes one JSON object per diagnostic.
pub fn write_jsonl(out: &mut dyn Write, file: Option<&str>, diagnostics: &[Diagnostic]) -> io::Result<()> {
    for diagnostic in diagnostics {
        let line = serde_json::to_string(&Line { file, diagnostic }).map_err(io::Error::other)?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}
