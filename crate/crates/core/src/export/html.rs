use alloc::format;
use alloc::string::String;

use crate::model::{Block, BlockKind, CodeLang, Document};
use crate::otsl::html::escape_into;
use crate::otsl::grid_to_html;

/// Semantic HTML rendering. Multi-page documents wrap each page in a
/// `<div class="page">`; block locations become `data-loc` attributes.
pub fn to_html(doc: &Document) -> String {
    let mut out = String::from("<html><body>");
    let paged = doc.pages.len() > 1;
    for page in &doc.pages {
        if paged {
            out.push_str("<div class=\"page\">");
        }
        for block in &page.blocks {
            render(block, &mut out);
        }
        if paged {
            out.push_str("</div>");
        }
    }
    out.push_str("</body></html>");
    out
}

fn open(tag: &str, class: Option<&str>, block: &Block, out: &mut String) {
    out.push('<');
    out.push_str(tag);
    if let Some(class) = class {
        out.push_str(" class=\"");
        out.push_str(class);
        out.push('"');
    }
    if let Some(loc) = block.loc {
        out.push_str(&format!(" data-loc=\"{} {} {} {}\"", loc.x1, loc.y1, loc.x2, loc.y2));
    }
    out.push('>');
}

fn element(tag: &str, class: Option<&str>, block: &Block, out: &mut String) {
    open(tag, class, block, out);
    escape_into(&block.text, false, out);
    out.push_str("</");
    out.push_str(tag);
    out.push('>');
}

fn render(block: &Block, out: &mut String) {
    match block.kind {
        BlockKind::Title => element("h1", None, block, out),
        BlockKind::SectionHeader => element("h2", None, block, out),
        BlockKind::Text => element("p", None, block, out),
        BlockKind::Footnote => element("p", Some("footnote"), block, out),
        BlockKind::Caption => element("p", Some("caption"), block, out),
        BlockKind::PageHeader => element("header", None, block, out),
        BlockKind::PageFooter => element("footer", None, block, out),
        BlockKind::Formula => element("div", Some("formula"), block, out),
        BlockKind::ListItem => {
            out.push_str("<ul>");
            element("li", None, block, out);
            out.push_str("</ul>");
        }
        BlockKind::OrderedList | BlockKind::UnorderedList => {
            let tag = if block.kind == BlockKind::OrderedList { "ol" } else { "ul" };
            open(tag, None, block, out);
            for item in &block.children {
                element("li", None, item, out);
            }
            out.push_str(&format!("</{tag}>"));
        }
        BlockKind::Code => {
            open("pre", None, block, out);
            match block.code_lang {
                Some(lang) if lang != CodeLang::Unknown => {
                    out.push_str("<code class=\"language-");
                    escape_into(lang.name(), true, out);
                    out.push_str("\">");
                }
                _ => out.push_str("<code>"),
            }
            escape_into(&block.text, false, out);
            out.push_str("</code></pre>");
        }
        BlockKind::Picture => {
            open("figure", Some("picture"), block, out);
            out.push_str("<img alt=\"");
            for (i, class) in block.picture_classes.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(class.name());
            }
            out.push_str("\">");
            for child in &block.children {
                if child.kind == BlockKind::Caption {
                    element("figcaption", None, child, out);
                } else {
                    render(child, out);
                }
            }
            out.push_str("</figure>");
        }
        BlockKind::Otsl => {
            let captioned = !block.children.is_empty();
            if captioned {
                open("figure", Some("table"), block, out);
            }
            if let Some(grid) = &block.table {
                let mut table = grid_to_html(grid);
                if !captioned {
                    if let Some(loc) = block.loc {
                        table = table.with_attr("data-loc", format!("{} {} {} {}", loc.x1, loc.y1, loc.x2, loc.y2));
                    }
                }
                table.write_html(out);
            }
            if captioned {
                for child in &block.children {
                    element("figcaption", None, child, out);
                }
                out.push_str("</figure>");
            }
        }
        BlockKind::DocumentIndex => {
            open("nav", Some("document-index"), block, out);
            match &block.table {
                Some(grid) => grid_to_html(grid).write_html(out),
                None => {
                    out.push_str("<ul>");
                    for line in block.text.lines().map(str::trim).filter(|l| !l.is_empty()) {
                        out.push_str("<li>");
                        escape_into(line, false, out);
                        out.push_str("</li>");
                    }
                    out.push_str("</ul>");
                }
            }
            out.push_str("</nav>");
        }
    }
}
