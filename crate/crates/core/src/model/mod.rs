//! Typed document model and whole-document validation.

mod vocab;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::diagnostic::{codes, Diagnostic};
use crate::otsl::TableGrid;

pub use vocab::{BlockKind, CodeLang, PictureClass};

/// Upper bound of the location grid. Coordinates are integers in
/// `0..=LOC_GRID_MAX`, proportional to the page width and height.
pub const LOC_GRID_MAX: u16 = 500;

/// Deepest nesting below a page root (`list > list_item`, `otsl > caption`).
pub const MAX_DEPTH: usize = 2;

/// Bounding box on the location grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LocBox {
    pub x1: u16,
    pub y1: u16,
    pub x2: u16,
    pub y2: u16,
}

impl LocBox {
    pub const fn new(x1: u16, y1: u16, x2: u16, y2: u16) -> Self {
        LocBox { x1, y1, x2, y2 }
    }

    pub const FULL_PAGE: LocBox = LocBox::new(0, 0, LOC_GRID_MAX, LOC_GRID_MAX);

    pub const fn coords(&self) -> [u16; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    pub fn in_range(&self) -> bool {
        self.coords().iter().all(|&c| c <= LOC_GRID_MAX)
    }

    pub fn is_ordered(&self) -> bool {
        self.x1 <= self.x2 && self.y1 <= self.y2
    }

    pub fn is_valid(&self) -> bool {
        self.in_range() && self.is_ordered()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Block {
    pub kind: BlockKind,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub loc: Option<LocBox>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "String::is_empty"))]
    pub text: String,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Vec::is_empty"))]
    pub children: Vec<Block>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub code_lang: Option<CodeLang>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Vec::is_empty"))]
    pub picture_classes: Vec<PictureClass>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub table: Option<TableGrid>,
}

impl Block {
    pub fn new(kind: BlockKind) -> Self {
        Block {
            kind,
            loc: None,
            text: String::new(),
            children: Vec::new(),
            code_lang: None,
            picture_classes: Vec::new(),
            table: None,
        }
    }

    pub fn with_text(kind: BlockKind, text: impl Into<String>) -> Self {
        let mut block = Block::new(kind);
        block.text = text.into();
        block
    }

    pub fn code(lang: Option<CodeLang>, source: impl Into<String>) -> Self {
        let mut block = Block::with_text(BlockKind::Code, source);
        block.code_lang = lang;
        block
    }

    pub fn table(grid: TableGrid) -> Self {
        let mut block = Block::new(BlockKind::Otsl);
        block.table = Some(grid);
        block
    }

    pub fn at(mut self, loc: LocBox) -> Self {
        self.loc = Some(loc);
        self
    }

    pub fn child(mut self, child: Block) -> Self {
        self.children.push(child);
        self
    }

    /// Pre-order walk over this block and its descendants.
    pub fn walk(&self) -> impl Iterator<Item = &Block> {
        let mut stack = vec![self];
        core::iter::from_fn(move || {
            let next = stack.pop()?;
            stack.extend(next.children.iter().rev());
            Some(next)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Page {
    #[cfg_attr(feature = "serde", serde(default))]
    pub blocks: Vec<Block>,
}

impl Page {
    pub fn new(blocks: Vec<Block>) -> Self {
        Page { blocks }
    }
}

/// In-memory form of a DocTags string: an ordered list of pages, each an
/// ordered list of blocks in reading order.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Document {
    pub pages: Vec<Page>,
}

impl Default for Document {
    /// One empty page.
    fn default() -> Self {
        Document {
            pages: vec![Page::default()],
        }
    }
}

impl Document {
    pub fn single_page(blocks: Vec<Block>) -> Self {
        Document {
            pages: vec![Page::new(blocks)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pages.iter().all(|p| p.blocks.is_empty())
    }

    /// All blocks of all pages, pre-order.
    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.pages
            .iter()
            .flat_map(|p| p.blocks.iter())
            .flat_map(Block::walk)
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        validate(self)
    }
}

/// Checks every model invariant; an empty result means the document is valid.
pub fn validate(doc: &Document) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if doc.pages.is_empty() {
        out.push(Diagnostic::error(
            codes::EMPTY_DOCUMENT,
            "a document has at least one page",
        ));
    }
    for (p, page) in doc.pages.iter().enumerate() {
        for (i, block) in page.blocks.iter().enumerate() {
            let mut path = vec![p, i];
            check_block(block, None, 1, &mut path, &mut out);
        }
    }
    out
}

fn check_block(
    block: &Block,
    parent: Option<BlockKind>,
    depth: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Diagnostic>,
) {
    let kind = block.kind;
    let mut report = |code: &'static str, message: String| {
        out.push(Diagnostic::error(code, message).with_path(path.clone()));
    };

    if let Some(parent) = parent {
        if !parent.admits_child(kind) {
            let code = if kind == BlockKind::Caption {
                codes::CAPTION_MISPLACED
            } else if kind == BlockKind::ListItem {
                codes::LIST_ITEM_MISPLACED
            } else if parent.is_list() {
                codes::LIST_CONTENT_INVALID
            } else {
                codes::CHILD_NOT_ALLOWED
            };
            report(code, format!("`{kind}` cannot be nested in `{parent}`"));
        } else if depth > MAX_DEPTH {
            report(
                codes::DEPTH_EXCEEDED,
                format!("`{kind}` nested {depth} levels deep (max {MAX_DEPTH})"),
            );
        }
    }

    if let Some(loc) = block.loc {
        if !loc.in_range() {
            report(
                codes::LOC_OUT_OF_RANGE,
                format!("location {:?} exceeds grid bound {LOC_GRID_MAX}", loc.coords()),
            );
        }
        if !loc.is_ordered() {
            report(
                codes::LOC_INVERTED,
                format!("location {:?} has x1 > x2 or y1 > y2", loc.coords()),
            );
        }
    }

    if block.code_lang.is_some() && kind != BlockKind::Code {
        report(
            codes::CODE_LANG_MISPLACED,
            format!("code language on `{kind}`"),
        );
    }
    if !block.picture_classes.is_empty() && kind != BlockKind::Picture {
        report(
            codes::PICTURE_CLASS_MISPLACED,
            format!("picture classes on `{kind}`"),
        );
    }

    match (&block.table, kind.holds_table()) {
        (Some(_), false) => report(codes::TABLE_MISPLACED, format!("table payload on `{kind}`")),
        (None, _) if kind == BlockKind::Otsl => {
            report(codes::TABLE_MISSING, "`otsl` block without a table".into())
        }
        _ => {}
    }

    if !block.text.is_empty() {
        if !kind.holds_text() {
            report(codes::TEXT_NOT_ALLOWED, format!("`{kind}` cannot hold text"));
        } else if !kind.is_verbatim() && block.text.trim() != block.text {
            report(
                codes::TEXT_UNTRIMMED,
                "text has leading or trailing whitespace".into(),
            );
        }
        if kind == BlockKind::DocumentIndex && block.table.is_some() {
            report(
                codes::INDEX_PAYLOAD_CONFLICT,
                "`document_index` carries both a table and text".into(),
            );
        }
    }

    if let Some(grid) = &block.table {
        for d in grid.validate() {
            out.push(d.with_path(path.clone()));
        }
    }

    for (i, child) in block.children.iter().enumerate() {
        path.push(i);
        check_block(child, Some(kind), depth + 1, path, out);
        path.pop();
    }
}
