//! Text similarity scores and table tree edit distance similarity.

mod ted;
mod teds;
mod text;

pub use ted::{tree_edit_distance, Tree};
pub use teds::{html_tree, teds, TableLabel};
pub use text::{bleu, normalized_edit_distance, text_score, token_prf, tokens, TextScore, BLEU_EPSILON};
