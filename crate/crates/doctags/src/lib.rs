//! File formats, batch evaluation and the `doctags` command line on top of
//! [`doctags_core`].

pub mod cli;
pub mod codes;
pub mod eval;
pub mod json;
pub mod labels;
pub mod manifest;
pub mod policy;
pub mod report;

pub use doctags_core;
