//! Core of the DocTags toolkit.
//!
//! DocTags is an XML-like page markup where every element carries its type,
//! an optional bounding box on a 0..=500 location grid, and its content.
//! Tables are written in OTSL, a compact cell-tag language interleaved with
//! cell text. This crate holds everything that does not touch the outside
//! world:
//!
//! - [`model`]: the typed document tree and its validation rules
//! - [`parser`]: tokenizer, strict and repairing parser, canonical serializer
//! - [`otsl`]: table grids, OTSL decode/encode and HTML table trees
//! - [`geometry`]: location grid conversion, IoU and COCO-style mAP
//! - [`export`]: Markdown and HTML renderers
//! - [`metrics`]: text similarity scores and TEDS
//! - [`latex`]: LaTeX formula tokenization and normalization
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod diagnostic;
pub mod export;
pub mod geometry;
pub mod latex;
pub mod metrics;
pub mod model;
pub mod otsl;
pub mod parser;

pub use diagnostic::{Diagnostic, Severity, Span};
pub use model::{Block, BlockKind, CodeLang, Document, LocBox, Page, PictureClass};
pub use otsl::{CellRole, CellTag, GridCell, TableGrid};
pub use parser::{parse, parse_lenient, serialize, ParseMode, Parsed};
