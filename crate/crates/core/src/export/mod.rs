//! Renderers from the document model to Markdown and HTML.
//!
//! Blocks are emitted in document order. JSON persistence lives in the
//! `doctags` crate next to the other file formats.

mod html;
mod markdown;

pub use html::to_html;
pub use markdown::{to_markdown, MarkdownOptions};
