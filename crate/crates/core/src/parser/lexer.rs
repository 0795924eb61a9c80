//! DocTags tokenizer.
//!
//! Every byte of the input belongs to exactly one token. Anything between
//! `<` and `>` that is not part of the vocabulary stays inside the
//! surrounding text run and is reported as `unknown-tag`.

use alloc::format;
use alloc::vec::Vec;

use crate::diagnostic::{codes, Diagnostic, Span};
use crate::model::{BlockKind, PictureClass, LOC_GRID_MAX};
use crate::otsl::CellTag;

/// Name of an element that has an opening and a closing tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Element {
    Doctag,
    Block(BlockKind),
}

impl Element {
    pub fn from_name(name: &str) -> Option<Self> {
        if name == "doctag" {
            Some(Element::Doctag)
        } else {
            BlockKind::from_name(name).map(Element::Block)
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Element::Doctag => "doctag",
            Element::Block(kind) => kind.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind<'a> {
    Open(Element),
    Close(Element),
    /// `<loc_N>`, already clamped to the grid.
    Loc(u16),
    PageBreak,
    Cell(CellTag),
    /// `<_Name_>`; the name is not checked against the vocabulary here.
    CodeLang(&'a str),
    PictureClass(PictureClass),
    /// Raw text, entities not yet decoded.
    Text(&'a str),
}

impl TokenKind<'_> {
    pub fn is_blank_text(&self) -> bool {
        matches!(self, TokenKind::Text(t) if t.trim().is_empty())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind<'a>,
    pub span: Span,
}

pub fn tokenize<'a>(source: &'a str) -> (Vec<Token<'a>>, Vec<Diagnostic>) {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let mut text_start = 0;
    let mut pos = 0;

    let flush = |tokens: &mut Vec<Token<'a>>, start: usize, end: usize| {
        if start < end {
            tokens.push(Token {
                kind: TokenKind::Text(&source[start..end]),
                span: Span::new(start, end),
            });
        }
    };

    while pos < bytes.len() {
        if bytes[pos] != b'<' {
            pos += 1;
            continue;
        }
        let close = bytes[pos + 1..]
            .iter()
            .position(|&b| b == b'>' || b == b'<')
            .map(|i| pos + 1 + i);
        match close {
            Some(end) if bytes[end] == b'>' => {
                let inner = &source[pos + 1..end];
                let span = Span::new(pos, end + 1);
                match classify(inner, span, &mut diagnostics) {
                    Some(kind) => {
                        flush(&mut tokens, text_start, pos);
                        tokens.push(Token { kind, span });
                        text_start = end + 1;
                    }
                    None if looks_like_tag_name(inner) => diagnostics.push(
                        Diagnostic::warning(codes::UNKNOWN_TAG, format!("unknown tag `<{inner}>`"))
                            .with_span(span),
                    ),
                    None => {}
                }
                pos = end + 1;
            }
            _ => {
                let looks_like_tag = bytes
                    .get(pos + 1)
                    .is_some_and(|&b| b.is_ascii_alphabetic() || b == b'/' || b == b'_');
                if looks_like_tag {
                    let end = close.unwrap_or(bytes.len());
                    diagnostics.push(
                        Diagnostic::warning(codes::UNTERMINATED_TAG, "`<` without closing `>`")
                            .with_span(Span::new(pos, end)),
                    );
                }
                pos += 1;
            }
        }
    }
    flush(&mut tokens, text_start, bytes.len());
    (tokens, diagnostics)
}

fn looks_like_tag_name(inner: &str) -> bool {
    inner
        .bytes()
        .next()
        .is_some_and(|b| b.is_ascii_alphabetic() || b == b'/' || b == b'_')
}

fn classify<'a>(inner: &'a str, span: Span, diagnostics: &mut Vec<Diagnostic>) -> Option<TokenKind<'a>> {
    if let Some(name) = inner.strip_prefix('/') {
        return Element::from_name(name).map(TokenKind::Close);
    }
    if let Some(element) = Element::from_name(inner) {
        return Some(TokenKind::Open(element));
    }
    if inner == "page_break" {
        return Some(TokenKind::PageBreak);
    }
    if let Some(tag) = CellTag::from_name(inner) {
        return Some(TokenKind::Cell(tag));
    }
    if let Some(digits) = inner.strip_prefix("loc_") {
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let value = digits
            .bytes()
            .fold(0u32, |acc, b| acc.saturating_mul(10).saturating_add(u32::from(b - b'0')));
        if value > u32::from(LOC_GRID_MAX) {
            diagnostics.push(
                Diagnostic::warning(
                    codes::LOC_OUT_OF_RANGE,
                    format!("`<loc_{digits}>` clamped to {LOC_GRID_MAX}"),
                )
                .with_span(span),
            );
        }
        return Some(TokenKind::Loc(value.min(u32::from(LOC_GRID_MAX)) as u16));
    }
    if let Some(class) = PictureClass::from_name(inner) {
        return Some(TokenKind::PictureClass(class));
    }
    if inner.len() >= 3 && inner.starts_with('_') && inner.ends_with('_') {
        let name = &inner[1..inner.len() - 1];
        if !name.contains(|c: char| c.is_whitespace() || c == '<') {
            return Some(TokenKind::CodeLang(name));
        }
    }
    None
}
