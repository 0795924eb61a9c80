//! DocTags parsing and canonical serialization.
//!
//! [`parse`] runs in one of two modes. Strict mode rejects any structural
//! defect and returns no document when an error is found. Lenient mode
//! always returns a document: unclosed elements are closed where the next
//! element that cannot nest inside them begins, stray tokens are dropped,
//! out-of-range locations are clamped, untagged text becomes a `text` block
//! and a generation loop at the end of the input is cut down to one copy.
//! Every such repair is recorded as a diagnostic.

mod lexer;
mod repetition;
mod serialize;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::diagnostic::{codes, has_errors, Diagnostic, Severity, Span};
use crate::model::{Block, BlockKind, CodeLang, Document, LocBox, Page, MAX_DEPTH};
use crate::otsl::{self, OtslToken};

pub use lexer::{tokenize, Element, Token, TokenKind};
pub use repetition::{detect_repetition, DEFAULT_MAX_PERIOD, DEFAULT_MIN_REPEATS};
pub use serialize::{escape_text, serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    pub mode: ParseMode,
    /// Loop detection threshold; only used in lenient mode.
    pub min_repeats: usize,
    pub max_period: usize,
}

impl ParseOptions {
    pub const fn new(mode: ParseMode) -> Self {
        ParseOptions {
            mode,
            min_repeats: DEFAULT_MIN_REPEATS,
            max_period: DEFAULT_MAX_PERIOD,
        }
    }
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions::new(ParseMode::Strict)
    }
}

/// Result of [`parse`]. In strict mode `document` is `None` whenever a
/// diagnostic has error severity; in lenient mode it is always present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub document: Option<Document>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Parsed {
    pub fn has_errors(&self) -> bool {
        has_errors(&self.diagnostics)
    }
}

pub fn parse(source: &str, mode: ParseMode) -> Parsed {
    parse_with(source, ParseOptions::new(mode))
}

/// Lenient parse; never fails.
pub fn parse_lenient(source: &str) -> (Document, Vec<Diagnostic>) {
    let parsed = parse(source, ParseMode::Lenient);
    (parsed.document.unwrap_or_default(), parsed.diagnostics)
}

pub fn parse_with(source: &str, options: ParseOptions) -> Parsed {
    let (mut tokens, lex_diagnostics) = tokenize(source);
    let mut builder = Builder::new(options.mode, source.len());
    for d in lex_diagnostics {
        builder.push(d);
    }

    if options.mode == ParseMode::Lenient {
        let meaningful = tokens.len()
            - tokens
                .iter()
                .rev()
                .take_while(|t| t.kind.is_blank_text())
                .count();
        let kinds: Vec<TokenKind<'_>> = tokens[..meaningful].iter().map(|t| t.kind).collect();
        if let Some(cut) = detect_repetition(&kinds, options.min_repeats, options.max_period) {
            let dropped = Span::new(tokens[cut].span.start, source.len());
            builder.diagnostics.push(
                Diagnostic::warning(
                    codes::REPETITION_TRUNCATED,
                    format!("repeating token loop cut after one copy ({} tokens dropped)", meaningful - cut),
                )
                .with_span(dropped),
            );
            tokens.truncate(cut);
        }
    }

    for token in &tokens {
        builder.feed(token);
    }
    builder.finish()
}

struct Frame {
    block: Block,
    span: Span,
    path: Vec<usize>,
    locs: Vec<u16>,
    /// Non-whitespace text, cells or children seen; locations are no
    /// longer accepted.
    started: bool,
    cells: Vec<OtslToken>,
}

impl Frame {
    fn kind(&self) -> BlockKind {
        self.block.kind
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Root {
    /// Nothing meaningful seen yet.
    Pending,
    Open { explicit: bool },
    Closed,
}

struct Builder {
    mode: ParseMode,
    source_len: usize,
    pages: Vec<Page>,
    stack: Vec<Frame>,
    root: Root,
    trailing_reported: bool,
    diagnostics: Vec<Diagnostic>,
}

impl Builder {
    fn new(mode: ParseMode, source_len: usize) -> Self {
        Builder {
            mode,
            source_len,
            pages: vec![Page::default()],
            stack: Vec::new(),
            root: Root::Pending,
            trailing_reported: false,
            diagnostics: Vec::new(),
        }
    }

    /// Records a diagnostic, escalating repairable defects to errors in
    /// strict mode.
    fn push(&mut self, mut d: Diagnostic) {
        if self.mode == ParseMode::Strict && d.severity == Severity::Warning {
            d.severity = Severity::Error;
        }
        self.diagnostics.push(d);
    }

    fn defect(&mut self, code: &'static str, message: String, span: Span) {
        self.push(Diagnostic::warning(code, message).with_span(span));
    }

    fn defect_at(&mut self, code: &'static str, message: String, span: Span, path: Vec<usize>) {
        self.push(Diagnostic::warning(code, message).with_span(span).with_path(path));
    }

    fn page_index(&self) -> usize {
        self.pages.len() - 1
    }

    fn ensure_root(&mut self, span: Span) {
        if self.root == Root::Pending {
            self.defect(codes::MISSING_ROOT, "document is not wrapped in `<doctag>`".into(), span);
            self.root = Root::Open { explicit: false };
        }
    }

    fn feed(&mut self, token: &Token<'_>) {
        let span = token.span;
        match self.root {
            Root::Closed => {
                if !token.kind.is_blank_text() && !self.trailing_reported {
                    self.trailing_reported = true;
                    self.defect(
                        codes::TRAILING_CONTENT,
                        "content after `</doctag>` ignored".into(),
                        span,
                    );
                }
                return;
            }
            Root::Pending => {
                if token.kind.is_blank_text() {
                    return;
                }
                if token.kind == TokenKind::Open(Element::Doctag) {
                    self.root = Root::Open { explicit: true };
                    return;
                }
                self.ensure_root(span);
            }
            Root::Open { .. } => {}
        }

        match token.kind {
            TokenKind::Open(Element::Doctag) => {
                self.defect(codes::MISPLACED_TAG, "nested `<doctag>` ignored".into(), span)
            }
            TokenKind::Close(Element::Doctag) => {
                self.close_all(span);
                self.root = Root::Closed;
            }
            TokenKind::Open(Element::Block(kind)) => self.open(kind, span),
            TokenKind::Close(Element::Block(kind)) => self.close(kind, span),
            TokenKind::Loc(value) => self.loc(value, span),
            TokenKind::PageBreak => {
                self.close_all(span);
                self.pages.push(Page::default());
            }
            TokenKind::Cell(tag) => self.cell(tag, span),
            TokenKind::CodeLang(name) => self.code_lang(name, span),
            TokenKind::PictureClass(class) => match self.stack.last_mut() {
                Some(frame) if frame.kind() == BlockKind::Picture => {
                    frame.block.picture_classes.push(class);
                }
                _ => self.defect(
                    codes::MISPLACED_TAG,
                    format!("`<{class}>` outside `<picture>` dropped"),
                    span,
                ),
            },
            TokenKind::Text(raw) => self.text(raw, span),
        }
    }

    fn open(&mut self, kind: BlockKind, span: Span) {
        while let Some(top) = self.stack.last() {
            if top.kind().admits_child(kind) && self.stack.len() < MAX_DEPTH {
                break;
            }
            self.auto_close(span);
        }
        let path = match self.stack.last_mut() {
            Some(parent) => {
                parent.started = true;
                let mut path = parent.path.clone();
                path.push(parent.block.children.len());
                path
            }
            None => vec![self.page_index(), self.pages.last().map_or(0, |p| p.blocks.len())],
        };
        if kind == BlockKind::Otsl && self.stack.last().is_some_and(|p| p.kind() == BlockKind::Picture) {
            self.diagnostics.push(
                Diagnostic::info(codes::PICTURE_TABLE, "table nested in picture")
                    .with_span(span)
                    .with_path(path.clone()),
            );
        }
        self.stack.push(Frame {
            block: Block::new(kind),
            span,
            path,
            locs: Vec::new(),
            started: false,
            cells: Vec::new(),
        });
    }

    fn close(&mut self, kind: BlockKind, span: Span) {
        match self.stack.iter().rposition(|f| f.kind() == kind) {
            Some(pos) => {
                while self.stack.len() > pos + 1 {
                    self.auto_close(span);
                }
                self.pop();
            }
            None => self.defect(
                codes::UNMATCHED_CLOSE,
                format!("`</{kind}>` without matching open tag"),
                span,
            ),
        }
    }

    fn auto_close(&mut self, at: Span) {
        if let Some(frame) = self.stack.last() {
            let (kind, span, path) = (frame.kind(), frame.span, frame.path.clone());
            self.defect_at(
                codes::UNCLOSED_TAG,
                format!("`<{kind}>` closed implicitly at byte {}", at.start),
                span,
                path,
            );
            self.pop();
        }
    }

    fn close_all(&mut self, at: Span) {
        while !self.stack.is_empty() {
            self.auto_close(at);
        }
    }

    fn loc(&mut self, value: u16, span: Span) {
        match self.stack.last_mut() {
            Some(frame) if !frame.started && frame.locs.len() < 4 => {
                if frame.block.kind.is_verbatim() {
                    frame.block.text.clear();
                }
                frame.locs.push(value);
            }
            _ => self.defect(
                codes::MISPLACED_TAG,
                format!("`<loc_{value}>` not at the start of an element dropped"),
                span,
            ),
        }
    }

    fn code_lang(&mut self, name: &str, span: Span) {
        match self.stack.last_mut() {
            Some(frame) if frame.kind() == BlockKind::Code && frame.block.code_lang.is_none() => {
                if frame.block.text.trim().is_empty() {
                    frame.block.text.clear();
                }
                let lang = CodeLang::from_name(name);
                frame.block.code_lang = Some(lang.unwrap_or(CodeLang::Unknown));
                if lang.is_none() {
                    let path = frame.path.clone();
                    self.diagnostics.push(
                        Diagnostic::warning(
                            codes::UNKNOWN_CODE_LANG,
                            format!("unsupported language `{name}` read as `unknown`"),
                        )
                        .with_span(span)
                        .with_path(path),
                    );
                }
            }
            _ => self.defect(
                codes::MISPLACED_TAG,
                format!("`<_{name}_>` outside `<code>` or repeated; dropped"),
                span,
            ),
        }
    }

    fn cell(&mut self, tag: otsl::CellTag, span: Span) {
        let Some(pos) = self.stack.iter().rposition(|f| f.kind().holds_table()) else {
            return self.defect(
                codes::MISPLACED_TAG,
                format!("`<{tag}>` outside a table dropped"),
                span,
            );
        };
        while self.stack.len() > pos + 1 {
            self.auto_close(span);
        }
        let frame = self.stack.last_mut().expect("table frame");
        let conflict = frame.cells.is_empty() && !frame.block.text.trim().is_empty();
        frame.block.text.clear();
        frame.started = true;
        frame.cells.push(OtslToken::tag(tag));
        if conflict {
            let path = frame.path.clone();
            self.defect_at(
                codes::INDEX_PAYLOAD_CONFLICT,
                "text before table cells dropped".into(),
                span,
                path,
            );
        }
    }

    fn text(&mut self, raw: &str, span: Span) {
        let blank = raw.trim().is_empty();
        let Some(frame) = self.stack.last_mut() else {
            if blank {
                return;
            }
            self.defect(
                codes::UNTAGGED_TEXT,
                "text outside any element wrapped in `<text>`".into(),
                span,
            );
            let text = decode_entities(raw);
            self.pages
                .last_mut()
                .expect("at least one page")
                .blocks
                .push(Block::with_text(BlockKind::Text, text.trim()));
            return;
        };

        let kind = frame.kind();
        if kind.is_list() {
            if blank {
                return;
            }
            let text = decode_entities(raw);
            frame.started = true;
            frame
                .block
                .children
                .push(Block::with_text(BlockKind::ListItem, text.trim()));
            let path = frame.path.clone();
            self.defect_at(
                codes::UNTAGGED_TEXT,
                "text inside a list wrapped in `<list_item>`".into(),
                span,
                path,
            );
            return;
        }

        if kind.holds_table() && !frame.cells.is_empty() {
            let cell = frame.cells.last_mut().expect("non-empty");
            cell.text.get_or_insert_with(String::new).push_str(&decode_entities(raw));
            return;
        }
        if kind == BlockKind::Otsl {
            if !blank {
                let path = frame.path.clone();
                self.defect_at(
                    codes::UNEXPECTED_CELL_TEXT,
                    "text before the first table cell dropped".into(),
                    span,
                    path,
                );
            }
            return;
        }

        if !blank {
            frame.started = true;
        }
        frame.block.text.push_str(&decode_entities(raw));
    }

    fn pop(&mut self) {
        let frame = self.stack.pop().expect("pop on empty stack");
        let block = self.finish_block(frame);
        match self.stack.last_mut() {
            Some(parent) => parent.block.children.push(block),
            None => self.pages.last_mut().expect("page").blocks.push(block),
        }
    }

    fn finish_block(&mut self, frame: Frame) -> Block {
        let Frame {
            mut block,
            span,
            path,
            locs,
            cells,
            ..
        } = frame;

        match locs.len() {
            0 => {}
            4 => {
                let mut loc = LocBox::new(locs[0], locs[1], locs[2], locs[3]);
                if !loc.is_ordered() {
                    self.defect_at(
                        codes::LOC_INVERTED,
                        format!("location {:?} reordered", loc.coords()),
                        span,
                        path.clone(),
                    );
                    loc = LocBox::new(
                        loc.x1.min(loc.x2),
                        loc.y1.min(loc.y2),
                        loc.x1.max(loc.x2),
                        loc.y1.max(loc.y2),
                    );
                }
                block.loc = Some(loc);
            }
            n => self.defect_at(
                codes::INCOMPLETE_LOC,
                format!("{n} of 4 location tags; location dropped"),
                span,
                path.clone(),
            ),
        }

        if block.kind.holds_table() && (!cells.is_empty() || block.kind == BlockKind::Otsl) {
            let (grid, diagnostics) = otsl::decode(&cells);
            for mut d in diagnostics {
                if self.mode == ParseMode::Lenient && d.severity == Severity::Error {
                    d.severity = Severity::Warning;
                }
                self.diagnostics.push(d.with_span(span).with_path(path.clone()));
            }
            block.table = Some(grid);
            block.text.clear();
        }

        if !block.kind.is_verbatim() {
            let trimmed = block.text.trim();
            if trimmed.len() != block.text.len() {
                block.text = String::from(trimmed);
            }
        }
        block
    }

    fn finish(mut self) -> Parsed {
        let end = Span::new(self.source_len, self.source_len);
        match self.root {
            Root::Pending => self.defect(
                codes::MISSING_ROOT,
                "no `<doctag>` element found".into(),
                Span::new(0, 0),
            ),
            Root::Open { explicit } => {
                self.close_all(end);
                if explicit {
                    self.defect(codes::UNCLOSED_TAG, "`<doctag>` never closed".into(), end);
                }
            }
            Root::Closed => {}
        }

        let document = Document { pages: self.pages };
        if self.mode == ParseMode::Lenient {
            self.diagnostics.extend(missing_locs(&document));
        }
        let violations = document.validate();
        debug_assert!(violations.is_empty(), "parser built an invalid document: {violations:?}");
        self.diagnostics.extend(violations);

        let document = if self.mode == ParseMode::Strict && has_errors(&self.diagnostics) {
            None
        } else {
            Some(document)
        };
        Parsed {
            document,
            diagnostics: self.diagnostics,
        }
    }
}

/// Blocks without a location on pages where other blocks have one.
fn missing_locs(doc: &Document) -> Vec<Diagnostic> {
    fn walk(block: &Block, path: &mut Vec<usize>, out: &mut Vec<Diagnostic>) {
        if block.loc.is_none() {
            out.push(
                Diagnostic::info(codes::MISSING_LOC, format!("`<{}>` has no location", block.kind))
                    .with_path(path.clone()),
            );
        }
        for (i, child) in block.children.iter().enumerate() {
            path.push(i);
            walk(child, path, out);
            path.pop();
        }
    }

    let mut out = Vec::new();
    for (p, page) in doc.pages.iter().enumerate() {
        let any_loc = page.blocks.iter().flat_map(Block::walk).any(|b| b.loc.is_some());
        if !any_loc {
            continue;
        }
        for (i, block) in page.blocks.iter().enumerate() {
            walk(block, &mut vec![p, i], &mut out);
        }
    }
    out
}

/// Decodes the three entities the serializer writes: `&lt;`, `&gt;`, `&amp;`.
pub fn decode_entities(raw: &str) -> String {
    if !raw.contains('&') {
        return String::from(raw);
    }
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        rest = &rest[i..];
        let (ch, len) = if rest.starts_with("&lt;") {
            ('<', 4)
        } else if rest.starts_with("&gt;") {
            ('>', 4)
        } else if rest.starts_with("&amp;") {
            ('&', 5)
        } else {
            ('&', 1)
        };
        out.push(ch);
        rest = &rest[len..];
    }
    out.push_str(rest);
    out
}
