//! HTML table trees: conversion from and to [`TableGrid`], a small tolerant
//! parser for `<table>` markup, and rendering.
//!
//! Grids render as `table > tr > td|th`. Column headers become `th`; row
//! headers and section rows stay `td` with a `data-role` attribute so the
//! role survives a round trip. `rowspan`/`colspan` are written only when
//! greater than one.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{CellRole, GridCell, TableGrid};
use crate::diagnostic::{codes, Diagnostic};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HtmlNode {
    pub tag: String,
    pub attrs: Vec<(String, String)>,
    pub text: String,
    pub children: Vec<HtmlNode>,
}

impl HtmlNode {
    pub fn new(tag: impl Into<String>) -> Self {
        HtmlNode {
            tag: tag.into(),
            ..HtmlNode::default()
        }
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = text.into();
        self
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.attrs.push((name.into(), value.into()));
        self
    }

    pub fn with_child(mut self, child: HtmlNode) -> Self {
        self.children.push(child);
        self
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    /// `rowspan`/`colspan` value, defaulting to 1.
    pub fn span(&self, name: &str) -> usize {
        self.attr(name)
            .and_then(|v| v.trim().parse().ok())
            .filter(|&n| n > 0)
            .unwrap_or(1)
    }

    pub fn is_cell(&self) -> bool {
        self.tag == "td" || self.tag == "th"
    }

    /// Number of nodes in the tree, text not counted.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(HtmlNode::node_count).sum::<usize>()
    }

    /// Same tree with every text payload removed.
    pub fn without_text(&self) -> HtmlNode {
        HtmlNode {
            tag: self.tag.clone(),
            attrs: self.attrs.clone(),
            text: String::new(),
            children: self.children.iter().map(HtmlNode::without_text).collect(),
        }
    }

    pub fn to_html(&self) -> String {
        let mut out = String::new();
        self.write_html(&mut out);
        out
    }

    pub fn write_html(&self, out: &mut String) {
        out.push('<');
        out.push_str(&self.tag);
        for (k, v) in &self.attrs {
            out.push(' ');
            out.push_str(k);
            out.push_str("=\"");
            escape_into(v, true, out);
            out.push('"');
        }
        out.push('>');
        escape_into(&self.text, false, out);
        for child in &self.children {
            child.write_html(out);
        }
        out.push_str("</");
        out.push_str(&self.tag);
        out.push('>');
    }
}

pub(crate) fn escape_into(text: &str, attribute: bool, out: &mut String) {
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' if attribute => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
}

pub fn grid_to_html(grid: &TableGrid) -> HtmlNode {
    let mut table = HtmlNode::new("table");
    for row in &grid.cells {
        let mut tr = HtmlNode::new("tr");
        for cell in row.iter().filter(|c| c.origin) {
            let tag = if cell.role == CellRole::ColumnHeader {
                "th"
            } else {
                "td"
            };
            let mut node = HtmlNode::new(tag).with_text(cell.text.clone());
            if cell.row_span > 1 {
                node = node.with_attr("rowspan", cell.row_span.to_string());
            }
            if cell.col_span > 1 {
                node = node.with_attr("colspan", cell.col_span.to_string());
            }
            if matches!(cell.role, CellRole::RowHeader | CellRole::SectionRow) {
                node = node.with_attr("data-role", cell.role.name());
            }
            tr.children.push(node);
        }
        table.children.push(tr);
    }
    table
}

/// Lays out an HTML table tree on a grid the way browsers do: each cell
/// takes the next free slot of its row, spans reserve slots below and to
/// the right. Overlaps keep the earlier cell; short rows are padded.
pub fn html_to_grid(table: &HtmlNode) -> Result<(TableGrid, Vec<Diagnostic>), Diagnostic> {
    if table.tag != "table" {
        return Err(Diagnostic::error(
            codes::NOT_A_TABLE,
            format!("expected a `table` root, found `{}`", table.tag),
        ));
    }
    let mut diagnostics = Vec::new();
    let mut rows: Vec<(&HtmlNode, bool)> = Vec::new();
    collect_rows(table, false, &mut rows);

    let n_rows = rows.len();
    if n_rows == 0 {
        diagnostics.push(Diagnostic::error(codes::EMPTY_TABLE, "table has no rows"));
        return Ok((TableGrid::blank(1, 1), diagnostics));
    }

    // slot -> index into `placed`
    let mut occupancy: Vec<Vec<Option<usize>>> = vec![Vec::new(); n_rows];
    let mut placed: Vec<(usize, usize, GridCell)> = Vec::new();

    for (r, (tr, in_head)) in rows.iter().enumerate() {
        let mut c = 0;
        for node in tr.children.iter().filter(|n| n.is_cell()) {
            while occupancy[r].get(c).is_some_and(Option::is_some) {
                c += 1;
            }
            for name in ["rowspan", "colspan"] {
                if let Some(v) = node.attr(name) {
                    if v.trim().parse::<usize>().ok().filter(|&n| n > 0).is_none() {
                        diagnostics.push(Diagnostic::warning(
                            codes::BAD_SPAN_ATTRIBUTE,
                            format!("{name}=\"{v}\" in row {r} read as 1"),
                        ));
                    }
                }
            }
            let mut row_span = node.span("rowspan");
            let mut col_span = node.span("colspan");
            if r + row_span > n_rows {
                diagnostics.push(Diagnostic::warning(
                    codes::SPAN_CONFLICT,
                    format!("rowspan {row_span} at ({r},{c}) runs past the last row"),
                ));
                row_span = n_rows - r;
            }
            let free_cols = (c..c + col_span)
                .take_while(|&cc| occupancy[r].get(cc).is_none_or(Option::is_none))
                .count();
            let mut free_rows = 1;
            while free_rows < row_span
                && (c..c + free_cols).all(|cc| {
                    occupancy[r + free_rows]
                        .get(cc)
                        .is_none_or(Option::is_none)
                })
            {
                free_rows += 1;
            }
            if free_cols < col_span || free_rows < row_span {
                diagnostics.push(Diagnostic::warning(
                    codes::SPAN_CONFLICT,
                    format!(
                        "cell at ({r},{c}) span {row_span}x{col_span} overlaps an earlier cell; cut to {free_rows}x{free_cols}"
                    ),
                ));
                row_span = free_rows;
                col_span = free_cols;
            }

            let index = placed.len();
            for row in occupancy.iter_mut().skip(r).take(row_span) {
                if row.len() < c + col_span {
                    row.resize(c + col_span, None);
                }
                for slot in &mut row[c..c + col_span] {
                    *slot = Some(index);
                }
            }
            let role = match node.attr("data-role") {
                Some("row_header") => CellRole::RowHeader,
                Some("section_row") => CellRole::SectionRow,
                Some("column_header") => CellRole::ColumnHeader,
                _ if node.tag == "th" || *in_head => CellRole::ColumnHeader,
                _ => CellRole::Body,
            };
            let cell = GridCell::text(node.text.trim())
                .with_role(role)
                .with_span(row_span, col_span);
            placed.push((r, c, cell));
            c += col_span;
        }
    }

    let n_cols = occupancy.iter().map(Vec::len).max().unwrap_or(0).max(1);
    let mut cells = vec![vec![GridCell::covered(); n_cols]; n_rows];
    for (r, row) in occupancy.iter().enumerate() {
        let holes = (0..n_cols)
            .filter(|&c| row.get(c).is_none_or(Option::is_none))
            .count();
        if holes > 0 {
            diagnostics.push(Diagnostic::warning(
                codes::ROW_PADDED,
                format!("row {r} padded with {holes} empty cell(s)"),
            ));
            for (c, slot) in cells[r].iter_mut().enumerate() {
                if row.get(c).is_none_or(Option::is_none) {
                    *slot = GridCell::empty();
                }
            }
        }
    }
    for (r, c, cell) in placed {
        cells[r][c] = cell;
    }
    Ok((TableGrid { cells }, diagnostics))
}

fn collect_rows<'a>(node: &'a HtmlNode, in_head: bool, rows: &mut Vec<(&'a HtmlNode, bool)>) {
    for child in &node.children {
        match child.tag.as_str() {
            "tr" => rows.push((child, in_head)),
            "thead" => collect_rows(child, true, rows),
            "tbody" | "tfoot" => collect_rows(child, in_head, rows),
            _ => {}
        }
    }
}

/// Parses the first `<table>` element out of an HTML string.
///
/// The parser is tolerant: missing `</td>`, `</th>` and `</tr>` close tags
/// are inferred, unknown close tags are ignored, and any markup inside a
/// cell is flattened into the cell's text.
pub fn parse_html_table(src: &str) -> Result<HtmlNode, Diagnostic> {
    let mut stack: Vec<HtmlNode> = Vec::new();
    let mut rest = src;
    let mut done: Option<HtmlNode> = None;

    while !rest.is_empty() && done.is_none() {
        let Some(lt) = rest.find('<') else {
            push_text(&mut stack, rest);
            break;
        };
        push_text(&mut stack, &rest[..lt]);
        rest = &rest[lt..];
        if let Some(after) = rest.strip_prefix("<!--") {
            rest = after.find("-->").map_or("", |i| &after[i + 3..]);
            continue;
        }
        let Some(gt) = rest.find('>') else {
            push_text(&mut stack, rest);
            break;
        };
        let inner = &rest[1..gt];
        rest = &rest[gt + 1..];
        if inner.starts_with('!') || inner.starts_with('?') {
            continue;
        }
        if let Some(name) = inner.strip_prefix('/') {
            let name = name.trim().to_ascii_lowercase();
            if let Some(pos) = stack.iter().rposition(|n| n.tag == name) {
                while stack.len() > pos {
                    let node = stack.pop().unwrap();
                    if let Some(finished) = attach(&mut stack, node) {
                        done = Some(finished);
                    }
                }
            }
            continue;
        }
        let self_closing = inner.ends_with('/');
        let inner = inner.trim_end_matches('/');
        let (name, attrs) = parse_tag(inner);
        if name.is_empty() {
            push_text(&mut stack, "<");
            continue;
        }
        if !in_table(&stack) && name != "table" {
            continue;
        }
        if in_cell(&stack) && !matches!(name.as_str(), "td" | "th" | "tr" | "table") {
            // inline markup inside a cell
            if name == "br" {
                push_text(&mut stack, " ");
            }
            continue;
        }
        if matches!(name.as_str(), "td" | "th" | "tr" | "thead" | "tbody" | "tfoot") {
            implicit_close(&mut stack, &name);
        }
        if self_closing || is_void(&name) {
            continue;
        }
        stack.push(HtmlNode {
            tag: name,
            attrs,
            ..HtmlNode::default()
        });
    }

    if done.is_none() {
        while let Some(node) = stack.pop() {
            if let Some(finished) = attach(&mut stack, node) {
                done = Some(finished);
            }
        }
    }
    done.ok_or_else(|| Diagnostic::error(codes::NOT_A_TABLE, "no <table> element found"))
}

fn attach(stack: &mut [HtmlNode], node: HtmlNode) -> Option<HtmlNode> {
    match stack.last_mut() {
        Some(parent) => {
            parent.children.push(node);
            None
        }
        None => Some(node),
    }
}

fn in_table(stack: &[HtmlNode]) -> bool {
    !stack.is_empty()
}

fn in_cell(stack: &[HtmlNode]) -> bool {
    stack.last().is_some_and(HtmlNode::is_cell)
}

fn implicit_close(stack: &mut Vec<HtmlNode>, opening: &str) {
    let closes: &[&str] = match opening {
        "td" | "th" => &["td", "th"],
        "tr" => &["td", "th", "tr"],
        _ => &["td", "th", "tr", "thead", "tbody", "tfoot"],
    };
    while stack.len() > 1 && stack.last().is_some_and(|n| closes.contains(&n.tag.as_str())) {
        let node = stack.pop().unwrap();
        attach(stack, node);
    }
}

fn is_void(name: &str) -> bool {
    matches!(
        name,
        "br" | "img" | "hr" | "col" | "meta" | "input" | "link" | "wbr"
    )
}

fn push_text(stack: &mut [HtmlNode], raw: &str) {
    if let Some(node) = stack.last_mut() {
        if node.is_cell() {
            node.text.push_str(&decode_entities(raw));
        }
    }
}

fn parse_tag(inner: &str) -> (String, Vec<(String, String)>) {
    let inner = inner.trim();
    let name_end = inner
        .find(|c: char| c.is_whitespace())
        .unwrap_or(inner.len());
    let name = inner[..name_end].to_ascii_lowercase();
    if !name.chars().all(|c| c.is_ascii_alphanumeric()) {
        return (String::new(), Vec::new());
    }
    let mut attrs = Vec::new();
    let mut rest = inner[name_end..].trim_start();
    while !rest.is_empty() {
        let key_end = rest
            .find(|c: char| c == '=' || c.is_whitespace())
            .unwrap_or(rest.len());
        let key = rest[..key_end].to_ascii_lowercase();
        rest = rest[key_end..].trim_start();
        let mut value = String::new();
        if let Some(after) = rest.strip_prefix('=') {
            let after = after.trim_start();
            let (v, tail) = match after.chars().next() {
                Some(q @ ('"' | '\'')) => {
                    let body = &after[1..];
                    let end = body.find(q).unwrap_or(body.len());
                    (&body[..end], body.get(end + 1..).unwrap_or(""))
                }
                _ => {
                    let end = after
                        .find(|c: char| c.is_whitespace())
                        .unwrap_or(after.len());
                    (&after[..end], &after[end..])
                }
            };
            value = decode_entities(v);
            rest = tail.trim_start();
        }
        if !key.is_empty() {
            attrs.push((key, value));
        }
    }
    (name, attrs)
}

/// Decodes the common named entities and numeric character references.
pub fn decode_entities(raw: &str) -> String {
    if !raw.contains('&') {
        return raw.to_owned();
    }
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let decoded = rest.find(';').filter(|&i| i <= 10).and_then(|semi| {
            let entity = &rest[1..semi];
            let ch = match entity {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "nbsp" => Some('\u{a0}'),
                _ => entity.strip_prefix('#').and_then(|num| {
                    let code = match num.strip_prefix(['x', 'X']) {
                        Some(hex) => u32::from_str_radix(hex, 16).ok(),
                        None => num.parse().ok(),
                    };
                    code.and_then(char::from_u32)
                }),
            };
            ch.map(|c| (c, semi + 1))
        });
        match decoded {
            Some((ch, len)) => {
                out.push(ch);
                rest = &rest[len..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn td(text: &str) -> HtmlNode {
        HtmlNode::new("td").with_text(text)
    }

    #[test]
    fn single_cell() {
        let grid = TableGrid::from_rows(vec![vec![GridCell::text("x")]]).unwrap();
        let html = grid_to_html(&grid);
        assert_eq!(html.to_html(), "<table><tr><td>x</td></tr></table>");
        assert_eq!(html_to_grid(&html).unwrap(), (grid, vec![]));
    }

    #[test]
    fn header_with_colspan() {
        let grid = TableGrid::from_rows(vec![
            vec![
                GridCell::text("H")
                    .with_role(CellRole::ColumnHeader)
                    .with_span(1, 2),
                GridCell::covered(),
            ],
            vec![GridCell::text("a"), GridCell::text("b")],
        ])
        .unwrap();
        let html = grid_to_html(&grid);
        assert_eq!(
            html.to_html(),
            "<table><tr><th colspan=\"2\">H</th></tr><tr><td>a</td><td>b</td></tr></table>"
        );
        assert_eq!(html_to_grid(&html).unwrap().0, grid);
    }

    #[test]
    fn empty_row_renders_empty_cells() {
        let grid = TableGrid::blank(1, 2);
        assert_eq!(
            grid_to_html(&grid).to_html(),
            "<table><tr><td></td><td></td></tr></table>"
        );
    }

    #[test]
    fn rowspan_layout() {
        let html = HtmlNode::new("table")
            .with_child(
                HtmlNode::new("tr")
                    .with_child(td("a").with_attr("rowspan", "2"))
                    .with_child(td("b")),
            )
            .with_child(HtmlNode::new("tr").with_child(td("c")));
        let (grid, diags) = html_to_grid(&html).unwrap();
        assert!(diags.is_empty());
        assert_eq!((grid.rows(), grid.cols()), (2, 2));
        assert_eq!(grid.cell(0, 0).unwrap().row_span, 2);
        assert!(!grid.cell(1, 0).unwrap().origin);
        assert_eq!(grid.cell(1, 1).unwrap().text, "c");
    }

    #[test]
    fn ragged_and_overlapping_input_is_repaired() {
        let html = HtmlNode::new("table")
            .with_child(
                HtmlNode::new("tr")
                    .with_child(td("a"))
                    .with_child(td("b").with_attr("rowspan", "2")),
            )
            .with_child(HtmlNode::new("tr").with_child(td("c").with_attr("colspan", "2")));
        let (grid, diags) = html_to_grid(&html).unwrap();
        assert!(grid.validate().is_empty());
        assert!(diags.iter().any(|d| d.code == codes::SPAN_CONFLICT));

        let ragged = HtmlNode::new("table")
            .with_child(HtmlNode::new("tr").with_child(td("a")).with_child(td("b")))
            .with_child(HtmlNode::new("tr").with_child(td("c")));
        let (grid, diags) = html_to_grid(&ragged).unwrap();
        assert!(grid.validate().is_empty());
        assert_eq!(diags[0].code, codes::ROW_PADDED);
        assert!(grid.cell(1, 1).unwrap().empty);
    }

    #[test]
    fn non_table_root_is_rejected() {
        assert_eq!(
            html_to_grid(&HtmlNode::new("div")).unwrap_err().code,
            codes::NOT_A_TABLE
        );
    }

    #[test]
    fn parses_real_world_markup() {
        let src = "<html><body><table border=1><thead><tr><th>Year<th>Total</tr></thead>\
                   <tbody><tr><td rowspan='2'>2020</td><td><b>10</b>&amp;<br/>x</td></tr>\
                   <tr><td>11</td></tr></tbody></table></body></html>";
        let table = parse_html_table(src).unwrap();
        let (grid, diags) = html_to_grid(&table).unwrap();
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!((grid.rows(), grid.cols()), (3, 2));
        assert_eq!(grid.cell(0, 1).unwrap().role, CellRole::ColumnHeader);
        assert_eq!(grid.cell(1, 1).unwrap().text, "10& x");
        assert_eq!(grid.cell(2, 1).unwrap().text, "11");
    }

    #[test]
    fn rendering_escapes_text() {
        let grid = TableGrid::from_rows(vec![vec![GridCell::text("a<b & c>")]]).unwrap();
        let html = grid_to_html(&grid).to_html();
        assert_eq!(html, "<table><tr><td>a&lt;b &amp; c&gt;</td></tr></table>");
        let back = parse_html_table(&html).unwrap();
        assert_eq!(html_to_grid(&back).unwrap().0, grid);
    }
}
