use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::model::{Block, BlockKind, CodeLang, Document};
use crate::otsl::TableGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MarkdownOptions {
    /// Keep `page_header` and `page_footer` blocks.
    pub include_page_furniture: bool,
    /// Render tables as pipe tables instead of dropping them.
    pub include_tables: bool,
}

/// CommonMark rendering. Blocks are separated by blank lines; the output
/// ends with a newline unless it is empty.
pub fn to_markdown(doc: &Document, opts: MarkdownOptions) -> String {
    let mut parts = Vec::new();
    for block in doc.pages.iter().flat_map(|p| &p.blocks) {
        render(block, opts, &mut parts);
    }
    if parts.is_empty() {
        return String::new();
    }
    let mut out = parts.join("\n\n");
    out.push('\n');
    out
}

fn render(block: &Block, opts: MarkdownOptions, parts: &mut Vec<String>) {
    match block.kind {
        BlockKind::Title => parts.push(format!("# {}", inline(&block.text))),
        BlockKind::SectionHeader => parts.push(format!("## {}", inline(&block.text))),
        BlockKind::Text | BlockKind::Footnote | BlockKind::Caption => push_paragraph(&block.text, parts),
        BlockKind::PageHeader | BlockKind::PageFooter => {
            if opts.include_page_furniture {
                push_paragraph(&block.text, parts);
            }
        }
        BlockKind::ListItem => parts.push(format!("- {}", inline(&block.text))),
        BlockKind::UnorderedList | BlockKind::OrderedList => {
            let ordered = block.kind == BlockKind::OrderedList;
            let items: Vec<String> = block
                .children
                .iter()
                .enumerate()
                .map(|(i, item)| {
                    if ordered {
                        format!("{}. {}", i + 1, inline(&item.text))
                    } else {
                        format!("- {}", inline(&item.text))
                    }
                })
                .collect();
            if !items.is_empty() {
                parts.push(items.join("\n"));
            }
        }
        BlockKind::Code => parts.push(code_fence(block.code_lang, &block.text)),
        BlockKind::Formula => parts.push(format!("$${}$$", block.text.trim())),
        BlockKind::Picture => {
            let alt: Vec<&str> = block.picture_classes.iter().map(|c| c.name()).collect();
            parts.push(format!("![{}]()", alt.join(", ")));
            for child in &block.children {
                render(child, opts, parts);
            }
        }
        BlockKind::Otsl => {
            if opts.include_tables {
                if let Some(grid) = &block.table {
                    parts.push(pipe_table(grid));
                }
            }
            for child in &block.children {
                render(child, opts, parts);
            }
        }
        BlockKind::DocumentIndex => match &block.table {
            Some(grid) => parts.push(pipe_table(grid)),
            None => {
                let entries: Vec<String> = block
                    .text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(|l| format!("- {}", inline(l)))
                    .collect();
                if !entries.is_empty() {
                    parts.push(entries.join("\n"));
                }
            }
        },
    }
}

fn push_paragraph(text: &str, parts: &mut Vec<String>) {
    if !text.is_empty() {
        parts.push(inline(text));
    }
}

/// Escapes characters that would otherwise read as raw HTML.
fn inline(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        if matches!(ch, '<' | '>') {
            out.push('\\');
        }
        out.push(ch);
    }
    out
}

fn code_fence(lang: Option<CodeLang>, source: &str) -> String {
    let longest_run = source
        .split(|c| c != '`')
        .map(str::len)
        .max()
        .unwrap_or(0);
    let fence = "`".repeat(longest_run.max(2) + 1);
    let label = match lang {
        Some(CodeLang::Unknown) | None => "",
        Some(lang) => lang.name(),
    };
    format!("{fence}{label}\n{source}\n{fence}")
}

/// Spans are flattened: the origin's text sits in its top-left slot and
/// covered slots stay blank. The first grid row becomes the header row.
fn pipe_table(grid: &TableGrid) -> String {
    let mut lines = Vec::with_capacity(grid.rows() + 1);
    for (r, row) in grid.cells.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .map(|cell| {
                if cell.origin {
                    table_cell(&cell.text)
                } else {
                    String::new()
                }
            })
            .collect();
        lines.push(format!("| {} |", cells.join(" | ")));
        if r == 0 {
            let rule: Vec<&str> = row.iter().map(|_| "---").collect();
            lines.push(format!("| {} |", rule.join(" | ")));
        }
    }
    lines.join("\n")
}

fn table_cell(text: &str) -> String {
    inline(text)
        .replace('|', "\\|")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PictureClass;
    use crate::otsl::GridCell;
    use alloc::vec;

    fn md(blocks: Vec<Block>) -> String {
        to_markdown(&Document::single_page(blocks), MarkdownOptions::default())
    }

    #[test]
    fn heading_and_paragraph() {
        let out = md(vec![
            Block::with_text(BlockKind::SectionHeader, "Intro"),
            Block::with_text(BlockKind::Text, "Hi"),
        ]);
        assert_eq!(out, "## Intro\n\nHi\n");
    }

    #[test]
    fn page_furniture_is_dropped_by_default() {
        let doc = Document::single_page(vec![Block::with_text(BlockKind::PageFooter, "3")]);
        assert_eq!(to_markdown(&doc, MarkdownOptions::default()), "");
        let opts = MarkdownOptions {
            include_page_furniture: true,
            ..MarkdownOptions::default()
        };
        assert_eq!(to_markdown(&doc, opts), "3\n");
    }

    #[test]
    fn code_keeps_indentation() {
        let out = md(vec![Block::code(Some(CodeLang::Cpp), "a;\n b;")]);
        assert_eq!(out, "```C++\na;\n b;\n```\n");
        let out = md(vec![Block::code(None, "x = ```")]);
        assert_eq!(out, "````\nx = ```\n````\n");
    }

    #[test]
    fn lists_formulas_and_pictures() {
        let mut picture = Block::new(BlockKind::Picture).child(Block::with_text(BlockKind::Caption, "Fig 1"));
        picture.picture_classes = vec![PictureClass::PieChart];
        let out = md(vec![
            Block::new(BlockKind::OrderedList)
                .child(Block::with_text(BlockKind::ListItem, "a"))
                .child(Block::with_text(BlockKind::ListItem, "b")),
            Block::new(BlockKind::UnorderedList).child(Block::with_text(BlockKind::ListItem, "c")),
            Block::with_text(BlockKind::Formula, "x^2"),
            picture,
        ]);
        assert_eq!(out, "1. a\n2. b\n\n- c\n\n$$x^2$$\n\n![pie_chart]()\n\nFig 1\n");
    }

    #[test]
    fn tables_only_on_request() {
        let grid = TableGrid::from_rows(vec![
            vec![GridCell::text("H").with_span(1, 2), GridCell::covered()],
            vec![GridCell::text("a|b"), GridCell::empty()],
        ])
        .unwrap();
        let doc = Document::single_page(vec![Block::table(grid).child(Block::with_text(BlockKind::Caption, "T"))]);
        assert_eq!(to_markdown(&doc, MarkdownOptions::default()), "T\n");
        let opts = MarkdownOptions {
            include_tables: true,
            ..MarkdownOptions::default()
        };
        assert_eq!(to_markdown(&doc, opts), "| H |  |\n| --- | --- |\n| a\\|b |  |\n\nT\n");
    }

    #[test]
    fn markup_like_text_is_escaped() {
        assert_eq!(md(vec![Block::with_text(BlockKind::Text, "<text>")]), "\\<text\\>\n");
    }

    #[test]
    fn textual_index_becomes_a_list() {
        let out = md(vec![Block::with_text(BlockKind::DocumentIndex, "Intro 1\nMethods 4")]);
        assert_eq!(out, "- Intro 1\n- Methods 4\n");
    }
}
