use alloc::string::String;
use alloc::vec::Vec;

use crate::diagnostic::{codes, Diagnostic, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatexTokenKind {
    /// `\name` or a backslash followed by one non-letter character.
    Command,
    /// An opening brace that is never closed.
    BraceOpen,
    /// A closing brace without an opener.
    BraceClose,
    /// Any other single character.
    Symbol,
    Whitespace,
    /// A balanced `{...}`; its inner tokens are in `children`.
    BracedGroup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatexToken {
    pub kind: LatexTokenKind,
    /// Exact source text; for groups this includes both braces.
    pub lexeme: String,
    pub children: Vec<LatexToken>,
}

impl LatexToken {
    fn leaf(kind: LatexTokenKind, lexeme: &str) -> Self {
        LatexToken {
            kind,
            lexeme: lexeme.into(),
            children: Vec::new(),
        }
    }
}

/// Lossless tokenization: the lexemes of the top-level tokens concatenate
/// to `src`. Unbalanced braces produce [`LatexTokenKind::BraceOpen`] or
/// [`LatexTokenKind::BraceClose`] tokens and a diagnostic.
pub fn tokenize_latex(src: &str) -> (Vec<LatexToken>, Vec<Diagnostic>) {
    let mut lexer = Lexer {
        src,
        pos: 0,
        diagnostics: Vec::new(),
    };
    let (tokens, _) = lexer.level(0);
    (tokens, lexer.diagnostics)
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    diagnostics: Vec<Diagnostic>,
}

impl Lexer<'_> {
    /// Lexes until the matching `}` (consumed, returns `true`) or the end
    /// of input.
    fn level(&mut self, depth: usize) -> (Vec<LatexToken>, bool) {
        let mut tokens = Vec::new();
        while let Some(ch) = self.src[self.pos..].chars().next() {
            let start = self.pos;
            match ch {
                '{' => {
                    self.pos += 1;
                    let (inner, closed) = self.level(depth + 1);
                    if closed {
                        tokens.push(LatexToken {
                            kind: LatexTokenKind::BracedGroup,
                            lexeme: self.src[start..self.pos].into(),
                            children: inner,
                        });
                    } else {
                        self.diagnostics.push(
                            Diagnostic::warning(codes::UNBALANCED_BRACE, "`{` is never closed")
                                .with_span(Span::new(start, start + 1)),
                        );
                        tokens.push(LatexToken::leaf(LatexTokenKind::BraceOpen, "{"));
                        tokens.extend(inner);
                    }
                }
                '}' => {
                    self.pos += 1;
                    if depth > 0 {
                        return (tokens, true);
                    }
                    self.diagnostics.push(
                        Diagnostic::warning(codes::UNBALANCED_BRACE, "`}` without a matching `{`")
                            .with_span(Span::new(start, start + 1)),
                    );
                    tokens.push(LatexToken::leaf(LatexTokenKind::BraceClose, "}"));
                }
                '\\' => {
                    let rest = &self.src[start + 1..];
                    let len = match rest.chars().next() {
                        Some(c) if c.is_ascii_alphabetic() => {
                            rest.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(rest.len())
                        }
                        Some(c) => c.len_utf8(),
                        None => 0,
                    };
                    self.pos = start + 1 + len;
                    let kind = if len == 0 {
                        LatexTokenKind::Symbol
                    } else {
                        LatexTokenKind::Command
                    };
                    tokens.push(LatexToken::leaf(kind, &self.src[start..self.pos]));
                }
                c if c.is_whitespace() => {
                    let rest = &self.src[start..];
                    let len = rest.find(|c: char| !c.is_whitespace()).unwrap_or(rest.len());
                    self.pos = start + len;
                    tokens.push(LatexToken::leaf(LatexTokenKind::Whitespace, &self.src[start..self.pos]));
                }
                c => {
                    self.pos += c.len_utf8();
                    tokens.push(LatexToken::leaf(LatexTokenKind::Symbol, &self.src[start..self.pos]));
                }
            }
        }
        (tokens, false)
    }
}
