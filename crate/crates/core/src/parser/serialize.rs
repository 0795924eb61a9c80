//! Canonical DocTags output.
//!
//! One `<doctag>` root, pages separated by `<page_break>`, and inside each
//! element: location tags, then the code language or picture classes, then
//! the content, then nested elements. No whitespace is inserted between
//! tags. `&`, `<` and `>` in content are written as entities.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::diagnostic::Diagnostic;
use crate::model::{Block, Document};
use crate::otsl;

/// Serializes a valid document; invalid documents are rejected with their
/// validation diagnostics.
pub fn serialize(doc: &Document) -> Result<String, Vec<Diagnostic>> {
    let diagnostics = doc.validate();
    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    let mut out = String::from("<doctag>");
    for (i, page) in doc.pages.iter().enumerate() {
        if i > 0 {
            out.push_str("<page_break>");
        }
        for block in &page.blocks {
            write_block(block, &mut out);
        }
    }
    out.push_str("</doctag>");
    Ok(out)
}

fn write_block(block: &Block, out: &mut String) {
    let name = block.kind.name();
    out.push('<');
    out.push_str(name);
    out.push('>');
    if let Some(loc) = block.loc {
        for c in loc.coords() {
            let _ = write!(out, "<loc_{c}>");
        }
    }
    if let Some(lang) = block.code_lang {
        let _ = write!(out, "<_{lang}_>");
    }
    for class in &block.picture_classes {
        let _ = write!(out, "<{class}>");
    }
    match &block.table {
        Some(grid) => {
            let tokens = otsl::encode(grid).expect("validated grid");
            for token in tokens {
                out.push('<');
                out.push_str(token.tag.name());
                out.push('>');
                if let Some(text) = &token.text {
                    escape_text(text, out);
                }
            }
        }
        None => escape_text(&block.text, out),
    }
    for child in &block.children {
        write_block(child, out);
    }
    out.push_str("</");
    out.push_str(name);
    out.push('>');
}

pub fn escape_text(text: &str, out: &mut String) {
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(ch),
        }
    }
}
