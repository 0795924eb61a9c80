//! OTSL table structure: cell tags, the resolved [`TableGrid`], and the
//! decode/encode pair between them.
//!
//! An OTSL run is a row-major sequence of cell tags, each row terminated by
//! `nl`. Content-bearing tags (`fcel`, `ched`, `rhed`, `srow`) are followed by
//! their cell text. Merged cells are spelled with `lcel` (merge with the cell
//! to the left), `ucel` (merge with the cell above) and `xcel` (interior of a
//! two-dimensional merge).

pub mod html;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::diagnostic::{codes, Diagnostic};

pub use html::{grid_to_html, html_to_grid, parse_html_table, HtmlNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellTag {
    Fcel,
    Ecel,
    Lcel,
    Ucel,
    Xcel,
    Ched,
    Rhed,
    Srow,
    Nl,
}

impl CellTag {
    pub const ALL: [CellTag; 9] = [
        CellTag::Fcel,
        CellTag::Ecel,
        CellTag::Lcel,
        CellTag::Ucel,
        CellTag::Xcel,
        CellTag::Ched,
        CellTag::Rhed,
        CellTag::Srow,
        CellTag::Nl,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            CellTag::Fcel => "fcel",
            CellTag::Ecel => "ecel",
            CellTag::Lcel => "lcel",
            CellTag::Ucel => "ucel",
            CellTag::Xcel => "xcel",
            CellTag::Ched => "ched",
            CellTag::Rhed => "rhed",
            CellTag::Srow => "srow",
            CellTag::Nl => "nl",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        CellTag::ALL.iter().copied().find(|t| t.name() == name)
    }

    /// Tags followed by cell text.
    pub const fn carries_text(self) -> bool {
        matches!(
            self,
            CellTag::Fcel | CellTag::Ched | CellTag::Rhed | CellTag::Srow
        )
    }

    const fn role(self) -> CellRole {
        match self {
            CellTag::Ched => CellRole::ColumnHeader,
            CellTag::Rhed => CellRole::RowHeader,
            CellTag::Srow => CellRole::SectionRow,
            _ => CellRole::Body,
        }
    }
}

impl fmt::Display for CellTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One element of an interleaved OTSL run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtslToken {
    pub tag: CellTag,
    pub text: Option<String>,
}

impl OtslToken {
    pub fn tag(tag: CellTag) -> Self {
        OtslToken { tag, text: None }
    }

    pub fn with_text(tag: CellTag, text: impl Into<String>) -> Self {
        OtslToken {
            tag,
            text: Some(text.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CellRole {
    #[default]
    Body,
    ColumnHeader,
    RowHeader,
    SectionRow,
}

impl CellRole {
    pub const fn name(self) -> &'static str {
        match self {
            CellRole::Body => "body",
            CellRole::ColumnHeader => "column_header",
            CellRole::RowHeader => "row_header",
            CellRole::SectionRow => "section_row",
        }
    }

    const fn content_tag(self) -> CellTag {
        match self {
            CellRole::Body => CellTag::Fcel,
            CellRole::ColumnHeader => CellTag::Ched,
            CellRole::RowHeader => CellTag::Rhed,
            CellRole::SectionRow => CellTag::Srow,
        }
    }
}

/// One slot of a [`TableGrid`]. Origin slots hold a cell; every other slot
/// is covered by exactly one origin's span and is blank
/// ([`GridCell::covered`]).
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct GridCell {
    pub origin: bool,
    pub text: String,
    pub row_span: usize,
    pub col_span: usize,
    pub role: CellRole,
    pub empty: bool,
}

impl GridCell {
    pub fn text(text: impl Into<String>) -> Self {
        let text = text.into();
        GridCell {
            origin: true,
            empty: text.is_empty(),
            text,
            row_span: 1,
            col_span: 1,
            role: CellRole::Body,
        }
    }

    pub fn empty() -> Self {
        GridCell::text("")
    }

    pub fn covered() -> Self {
        GridCell {
            origin: false,
            text: String::new(),
            row_span: 1,
            col_span: 1,
            role: CellRole::Body,
            empty: false,
        }
    }

    pub fn with_role(mut self, role: CellRole) -> Self {
        self.role = role;
        self
    }

    pub fn with_span(mut self, row_span: usize, col_span: usize) -> Self {
        self.row_span = row_span;
        self.col_span = col_span;
        self
    }
}

/// Rectangular cell matrix with spans and header roles.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct TableGrid {
    pub cells: Vec<Vec<GridCell>>,
}

impl TableGrid {
    /// Builds a grid and checks every grid invariant.
    pub fn from_rows(cells: Vec<Vec<GridCell>>) -> Result<Self, Vec<Diagnostic>> {
        let grid = TableGrid { cells };
        let diagnostics = grid.validate();
        if diagnostics.is_empty() {
            Ok(grid)
        } else {
            Err(diagnostics)
        }
    }

    /// A `rows` x `cols` grid of empty cells.
    pub fn blank(rows: usize, cols: usize) -> Self {
        TableGrid {
            cells: vec![vec![GridCell::empty(); cols]; rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&GridCell> {
        self.cells.get(row)?.get(col)
    }

    /// Origin cells in row-major order with their coordinates.
    pub fn origins(&self) -> impl Iterator<Item = (usize, usize, &GridCell)> {
        self.cells.iter().enumerate().flat_map(|(r, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, cell)| cell.origin)
                .map(move |(c, cell)| (r, c, cell))
        })
    }

    #[allow(clippy::needless_range_loop)]
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let rows = self.rows();
        let cols = self.cols();
        if rows == 0 || cols == 0 {
            out.push(Diagnostic::error(
                codes::GRID_EMPTY,
                "a table has at least one row and one column",
            ));
            return out;
        }
        if let Some(r) = self.cells.iter().position(|row| row.len() != cols) {
            out.push(Diagnostic::error(
                codes::GRID_SHAPE,
                format!("row {r} has {} slots, expected {cols}", self.cells[r].len()),
            ));
            return out;
        }

        let mut covered = vec![vec![false; cols]; rows];
        for (r, c, cell) in self.origins() {
            if cell.row_span == 0
                || cell.col_span == 0
                || r + cell.row_span > rows
                || c + cell.col_span > cols
            {
                out.push(Diagnostic::error(
                    codes::SPAN_OUT_OF_BOUNDS,
                    format!(
                        "cell ({r},{c}) span {}x{} leaves the {rows}x{cols} grid",
                        cell.row_span, cell.col_span
                    ),
                ));
                continue;
            }
            for rr in r..r + cell.row_span {
                for cc in c..c + cell.col_span {
                    if (rr, cc) == (r, c) {
                        continue;
                    }
                    if self.cells[rr][cc].origin || covered[rr][cc] {
                        out.push(Diagnostic::error(
                            codes::SPAN_OVERLAP,
                            format!("cell ({r},{c}) overlaps slot ({rr},{cc})"),
                        ));
                    }
                    covered[rr][cc] = true;
                }
            }
            if cell.empty != cell.text.is_empty() {
                out.push(Diagnostic::error(
                    codes::EMPTY_CELL_TEXT,
                    format!("cell ({r},{c}) empty flag disagrees with its text"),
                ));
            }
            if cell.text.trim() != cell.text {
                out.push(Diagnostic::error(
                    codes::CELL_TEXT_UNTRIMMED,
                    format!("cell ({r},{c}) text has surrounding whitespace"),
                ));
            }
        }
        for (r, row) in self.cells.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if cell.origin {
                    continue;
                }
                if !covered[r][c] {
                    out.push(Diagnostic::error(
                        codes::SPAN_UNCOVERED,
                        format!("slot ({r},{c}) is not covered by any cell"),
                    ));
                }
                if *cell != GridCell::covered() {
                    out.push(Diagnostic::error(
                        codes::COVERED_CELL_NOT_BLANK,
                        format!("covered slot ({r},{c}) carries data"),
                    ));
                }
            }
        }
        out
    }
}

/// Resolves an OTSL run into a grid.
///
/// Rule violations are reported with error severity and the offending cell
/// is degraded to an empty cell, so a structurally valid grid is always
/// returned. Normalizations (a content tag without text) are reported as
/// info.
pub fn decode(tokens: &[OtslToken]) -> (TableGrid, Vec<Diagnostic>) {
    let mut diagnostics = Vec::new();

    let mut rows: Vec<Vec<(CellTag, Option<&str>)>> = Vec::new();
    let mut current = Vec::new();
    for token in tokens {
        if token.tag == CellTag::Nl {
            if token.text.as_deref().is_some_and(|t| !t.trim().is_empty()) {
                diagnostics.push(Diagnostic::error(
                    codes::UNEXPECTED_CELL_TEXT,
                    "text after `nl` dropped",
                ));
            }
            rows.push(core::mem::take(&mut current));
        } else {
            current.push((token.tag, token.text.as_deref()));
        }
    }
    if !current.is_empty() {
        diagnostics.push(Diagnostic::error(
            codes::MISSING_FINAL_NL,
            "table does not end with `nl`",
        ));
        rows.push(current);
    }

    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    if width == 0 {
        diagnostics.push(Diagnostic::error(codes::EMPTY_TABLE, "table has no cells"));
        return (TableGrid::blank(1, 1), diagnostics);
    }
    if rows.iter().any(|row| row.len() != width) {
        let lengths: Vec<String> = rows.iter().map(|r| r.len().to_string()).collect();
        diagnostics.push(Diagnostic::error(
            codes::RAGGED_ROWS,
            format!(
                "rows have unequal lengths [{}]; padded with empty cells",
                lengths.join(", ")
            ),
        ));
        for row in &mut rows {
            row.resize(width, (CellTag::Ecel, None));
        }
    }

    let mut resolver = SpanResolver::new(rows.len(), width);
    for (r, row) in rows.iter().enumerate() {
        for (c, &(tag, text)) in row.iter().enumerate() {
            let text = text.map(str::trim).filter(|t| !t.is_empty());
            if !tag.carries_text() && text.is_some() {
                diagnostics.push(Diagnostic::error(
                    codes::UNEXPECTED_CELL_TEXT,
                    format!("`{tag}` at ({r},{c}) cannot carry text; dropped"),
                ));
            }
            resolver.place(r, c, tag, text, &mut diagnostics);
        }
        resolver.close_row(r, &mut diagnostics);
    }
    (resolver.finish(), diagnostics)
}

struct Origin {
    row: usize,
    col: usize,
    row_span: usize,
    col_span: usize,
    cell: GridCell,
}

struct SpanResolver {
    origins: Vec<Origin>,
    owner: Vec<Vec<usize>>,
}

impl SpanResolver {
    fn new(rows: usize, cols: usize) -> Self {
        SpanResolver {
            origins: Vec::new(),
            owner: vec![vec![usize::MAX; cols]; rows],
        }
    }

    fn new_origin(&mut self, r: usize, c: usize, cell: GridCell) {
        self.owner[r][c] = self.origins.len();
        self.origins.push(Origin {
            row: r,
            col: c,
            row_span: 1,
            col_span: 1,
            cell,
        });
    }

    fn degrade(&mut self, r: usize, c: usize, code: &'static str, why: &str, out: &mut Vec<Diagnostic>) {
        out.push(Diagnostic::error(
            code,
            format!("{why} at ({r},{c}); treated as empty cell"),
        ));
        self.new_origin(r, c, GridCell::empty());
    }

    fn place(
        &mut self,
        r: usize,
        c: usize,
        tag: CellTag,
        text: Option<&str>,
        out: &mut Vec<Diagnostic>,
    ) {
        match tag {
            CellTag::Ecel => self.new_origin(r, c, GridCell::empty()),
            CellTag::Fcel | CellTag::Ched | CellTag::Rhed | CellTag::Srow => {
                let cell = match text {
                    Some(t) => GridCell::text(t).with_role(tag.role()),
                    None if tag == CellTag::Fcel => {
                        out.push(Diagnostic::info(
                            codes::EMPTY_FULL_CELL,
                            format!("`fcel` without text at ({r},{c}) read as `ecel`"),
                        ));
                        GridCell::empty()
                    }
                    None => GridCell::empty().with_role(tag.role()),
                };
                self.new_origin(r, c, cell);
            }
            CellTag::Lcel => {
                if c == 0 {
                    return self.degrade(r, c, codes::LCEL_FIRST_COLUMN, "`lcel` in first column", out);
                }
                let o = self.owner[r][c - 1];
                if self.origins[o].row != r {
                    return self.degrade(r, c, codes::LCEL_INVALID, "`lcel` outside its merge's first row", out);
                }
                self.origins[o].col_span += 1;
                self.owner[r][c] = o;
            }
            CellTag::Ucel => {
                if r == 0 {
                    return self.degrade(r, c, codes::UCEL_FIRST_ROW, "`ucel` in first row", out);
                }
                let o = self.owner[r - 1][c];
                let origin = &mut self.origins[o];
                if origin.col != c || origin.row + origin.row_span != r {
                    return self.degrade(r, c, codes::UCEL_INVALID, "`ucel` outside its merge's first column", out);
                }
                origin.row_span += 1;
                self.owner[r][c] = o;
            }
            CellTag::Xcel => {
                if r == 0 || c == 0 {
                    return self.degrade(r, c, codes::XCEL_INVALID, "`xcel` on the table border", out);
                }
                let left = self.owner[r][c - 1];
                let up = self.owner[r - 1][c];
                let ok = left == up && {
                    let o = &self.origins[left];
                    r > o.row && c > o.col && c < o.col + o.col_span
                };
                if !ok {
                    return self.degrade(
                        r,
                        c,
                        codes::XCEL_INVALID,
                        "`xcel` without left and upper neighbours in the same merge",
                        out,
                    );
                }
                self.owner[r][c] = left;
            }
            CellTag::Nl => unreachable!("rows are split on nl"),
        }
    }

    /// Merges that grew into row `r` must cover their full width there.
    fn close_row(&mut self, r: usize, out: &mut Vec<Diagnostic>) {
        for o in 0..self.origins.len() {
            let origin = &self.origins[o];
            if origin.row >= r || origin.row + origin.row_span - 1 != r {
                continue;
            }
            let (col, width) = (origin.col, origin.col_span);
            let owned: Vec<usize> = (0..self.owner[r].len())
                .filter(|&c| self.owner[r][c] == o)
                .collect();
            if owned.len() == width {
                continue;
            }
            out.push(Diagnostic::error(
                codes::NON_RECTANGULAR_MERGE,
                format!(
                    "merge from ({},{col}) covers {} of {width} columns in row {r}; row detached",
                    origin.row,
                    owned.len()
                ),
            ));
            self.origins[o].row_span -= 1;
            for c in owned {
                self.new_origin(r, c, GridCell::empty());
            }
        }
    }

    fn finish(self) -> TableGrid {
        let rows = self.owner.len();
        let cols = self.owner.first().map_or(0, Vec::len);
        let mut cells = vec![vec![GridCell::covered(); cols]; rows];
        for origin in self.origins {
            let cell = origin.cell.with_span(origin.row_span, origin.col_span);
            cells[origin.row][origin.col] = cell;
        }
        TableGrid { cells }
    }
}

/// Writes a valid grid as an OTSL run: row-major, `nl` after each row.
pub fn encode(grid: &TableGrid) -> Result<Vec<OtslToken>, Vec<Diagnostic>> {
    let diagnostics = grid.validate();
    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    let mut owner = vec![vec![(0usize, 0usize); grid.cols()]; grid.rows()];
    for (r, c, cell) in grid.origins() {
        for row in owner.iter_mut().skip(r).take(cell.row_span) {
            for slot in row.iter_mut().skip(c).take(cell.col_span) {
                *slot = (r, c);
            }
        }
    }

    let mut tokens = Vec::with_capacity(grid.rows() * (grid.cols() + 1));
    for (r, row) in grid.cells.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let token = if cell.origin {
                if cell.empty {
                    match cell.role {
                        CellRole::Body => OtslToken::tag(CellTag::Ecel),
                        role => OtslToken::tag(role.content_tag()),
                    }
                } else {
                    OtslToken::with_text(cell.role.content_tag(), cell.text.clone())
                }
            } else {
                let (or, oc) = owner[r][c];
                let tag = if r == or {
                    CellTag::Lcel
                } else if c == oc {
                    CellTag::Ucel
                } else {
                    CellTag::Xcel
                };
                OtslToken::tag(tag)
            };
            tokens.push(token);
        }
        tokens.push(OtslToken::tag(CellTag::Nl));
    }
    Ok(tokens)
}
