//! Findings reported by validation, parsing, decoding and normalization.
//!
//! Every diagnostic carries a stable kebab-case `code`. The full list of
//! codes lives in [`codes`]; downstream tooling should match on those
//! strings rather than on messages.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

/// Half-open byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub const fn len(&self) -> usize {
        self.end - self.start
    }

    pub const fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: Option<Span>,
    /// Page index followed by child indices, e.g. `[0, 2, 1]` is the second
    /// child of the third block on the first page.
    pub block_path: Option<Vec<usize>>,
}

impl Diagnostic {
    pub fn new(severity: Severity, code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity,
            code,
            message: message.into(),
            span: None,
            block_path: None,
        }
    }

    pub fn error(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(Severity::Error, code, message)
    }

    pub fn warning(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(Severity::Warning, code, message)
    }

    pub fn info(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(Severity::Info, code, message)
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span = Some(span);
        self
    }

    pub fn with_path(mut self, path: Vec<usize>) -> Self {
        self.block_path = Some(path);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]: {}", self.severity, self.code, self.message)?;
        if let Some(span) = self.span {
            write!(f, " at {}..{}", span.start, span.end)?;
        }
        Ok(())
    }
}

/// True when any diagnostic has error severity.
pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

/// Stable diagnostic codes.
pub mod codes {
    // model validation
    pub const CAPTION_MISPLACED: &str = "caption-misplaced";
    pub const LIST_ITEM_MISPLACED: &str = "list-item-misplaced";
    pub const LIST_CONTENT_INVALID: &str = "list-content-invalid";
    pub const CHILD_NOT_ALLOWED: &str = "child-not-allowed";
    pub const DEPTH_EXCEEDED: &str = "depth-exceeded";
    pub const LOC_INVERTED: &str = "loc-inverted";
    pub const LOC_OUT_OF_RANGE: &str = "loc-out-of-range";
    pub const CODE_LANG_MISPLACED: &str = "code-lang-misplaced";
    pub const PICTURE_CLASS_MISPLACED: &str = "picture-class-misplaced";
    pub const TABLE_MISPLACED: &str = "table-misplaced";
    pub const TABLE_MISSING: &str = "table-missing";
    pub const TEXT_NOT_ALLOWED: &str = "text-not-allowed";
    pub const TEXT_UNTRIMMED: &str = "text-untrimmed";
    pub const INDEX_PAYLOAD_CONFLICT: &str = "index-payload-conflict";
    pub const EMPTY_DOCUMENT: &str = "empty-document";

    // table grid
    pub const GRID_EMPTY: &str = "grid-empty";
    pub const GRID_SHAPE: &str = "grid-shape";
    pub const SPAN_OUT_OF_BOUNDS: &str = "span-out-of-bounds";
    pub const SPAN_OVERLAP: &str = "span-overlap";
    pub const SPAN_UNCOVERED: &str = "span-uncovered";
    pub const COVERED_CELL_NOT_BLANK: &str = "covered-cell-not-blank";
    pub const EMPTY_CELL_TEXT: &str = "empty-cell-text";
    pub const CELL_TEXT_UNTRIMMED: &str = "cell-text-untrimmed";

    // OTSL decoding
    pub const LCEL_FIRST_COLUMN: &str = "lcel-first-column";
    pub const UCEL_FIRST_ROW: &str = "ucel-first-row";
    pub const XCEL_INVALID: &str = "xcel-invalid";
    pub const LCEL_INVALID: &str = "lcel-invalid";
    pub const UCEL_INVALID: &str = "ucel-invalid";
    pub const RAGGED_ROWS: &str = "ragged-rows";
    pub const NON_RECTANGULAR_MERGE: &str = "non-rectangular-merge";
    pub const MISSING_FINAL_NL: &str = "missing-final-nl";
    pub const EMPTY_TABLE: &str = "empty-table";
    pub const EMPTY_FULL_CELL: &str = "empty-full-cell";
    pub const UNEXPECTED_CELL_TEXT: &str = "unexpected-cell-text";

    // HTML tables
    pub const NOT_A_TABLE: &str = "not-a-table";
    pub const SPAN_CONFLICT: &str = "span-conflict";
    pub const ROW_PADDED: &str = "row-padded";
    pub const BAD_SPAN_ATTRIBUTE: &str = "bad-span-attribute";

    // tokenizer / parser
    pub const UNKNOWN_TAG: &str = "unknown-tag";
    pub const UNTERMINATED_TAG: &str = "unterminated-tag";
    pub const UNCLOSED_TAG: &str = "unclosed-tag";
    pub const UNMATCHED_CLOSE: &str = "unmatched-close";
    pub const MISPLACED_TAG: &str = "misplaced-tag";
    pub const MISSING_ROOT: &str = "missing-root";
    pub const TRAILING_CONTENT: &str = "trailing-content";
    pub const UNTAGGED_TEXT: &str = "untagged-text";
    pub const INCOMPLETE_LOC: &str = "incomplete-loc";
    pub const MISSING_LOC: &str = "missing-loc";
    pub const UNKNOWN_CODE_LANG: &str = "unknown-code-lang";
    pub const PICTURE_TABLE: &str = "picture-table";
    pub const REPETITION_TRUNCATED: &str = "repetition-truncated";

    // geometry / evaluation
    pub const UNKNOWN_CLASS: &str = "unknown-class";
    pub const MISSING_SCORE: &str = "missing-score";

    // LaTeX
    pub const UNBALANCED_BRACE: &str = "unbalanced-brace";
    pub const UNPAIRED_DELIMITER: &str = "unpaired-delimiter";
    pub const MISSING_DELIMITER: &str = "missing-delimiter";
    pub const POLICY_CYCLE: &str = "policy-cycle";
    pub const POLICY_CONFLICT: &str = "policy-conflict";
}
