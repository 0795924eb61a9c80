//! LaTeX formula tokenization and normalization.
//!
//! Normalization rewrites a formula into a canonical token sequence so
//! that formulas written in different styles compare equal. It runs in
//! three stages: filtering (remove or replace commands named by the
//! policy), structural normalization (sized delimiters become
//! `\left`/`\right`, arguments of scripts and known commands are braced,
//! whitespace is canonicalized) and simplification (prime, dot and spacing
//! runs collapse). The passes repeat until the output no longer changes, so
//! [`normalize`] is idempotent.

mod lexer;
mod normalize;
mod policy;

pub use lexer::{tokenize_latex, LatexToken, LatexTokenKind};
pub use normalize::{normalize, normalize_with_diagnostics};
pub use policy::{CollapseRules, NormPolicy};
