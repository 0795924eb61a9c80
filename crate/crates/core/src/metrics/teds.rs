//! Tree edit distance similarity for HTML tables.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ted::{tree_edit_distance, Tree};
use super::text::normalized_edit_distance;
use crate::diagnostic::{codes, Diagnostic};
use crate::otsl::HtmlNode;

/// Node label used for table comparison.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TableLabel {
    pub tag: String,
    pub row_span: usize,
    pub col_span: usize,
    /// Cell text; `None` for non-cell nodes.
    pub text: Option<String>,
}

/// Converts an HTML table into a comparison tree, optionally dropping cell
/// text.
pub fn html_tree(node: &HtmlNode, structure_only: bool) -> Tree<TableLabel> {
    let cell = node.is_cell();
    Tree::node(
        TableLabel {
            tag: node.tag.clone(),
            row_span: if cell { node.span("rowspan") } else { 1 },
            col_span: if cell { node.span("colspan") } else { 1 },
            text: match (cell, structure_only) {
                (true, false) => Some(node.text.clone()),
                (true, true) => Some(String::new()),
                _ => None,
            },
        },
        node.children.iter().map(|c| html_tree(c, structure_only)).collect::<Vec<_>>(),
    )
}

fn rename_cost(a: &TableLabel, b: &TableLabel) -> f64 {
    if a.tag != b.tag || a.row_span != b.row_span || a.col_span != b.col_span {
        return 1.0;
    }
    match (&a.text, &b.text) {
        (Some(x), Some(y)) => normalized_edit_distance(x, y),
        _ => 0.0,
    }
}

/// `1 - TED(pred, gt) / max(|pred|, |gt|)`. With `structure_only` all cell
/// text is ignored.
pub fn teds(pred: &HtmlNode, gt: &HtmlNode, structure_only: bool) -> Result<f64, Diagnostic> {
    for root in [pred, gt] {
        if root.tag != "table" {
            return Err(Diagnostic::error(
                codes::NOT_A_TABLE,
                format!("expected a `table` root, found `{}`", root.tag),
            ));
        }
    }
    let a = html_tree(pred, structure_only);
    let b = html_tree(gt, structure_only);
    let largest = a.size().max(b.size()) as f64;
    let distance = tree_edit_distance(&a, &b, rename_cost);
    Ok((1.0 - distance / largest).clamp(0.0, 1.0))
}
