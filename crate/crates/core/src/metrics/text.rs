use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

/// Floor applied to a zero n-gram precision before taking logarithms.
pub const BLEU_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TextScore {
    pub edit_distance: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub bleu: f64,
}

pub fn text_score(pred: &str, gt: &str) -> TextScore {
    let (precision, recall, f1) = token_prf(pred, gt);
    TextScore {
        edit_distance: normalized_edit_distance(pred, gt),
        precision,
        recall,
        f1,
        bleu: bleu(pred, gt, 4),
    }
}

/// Levenshtein distance over Unicode scalar values divided by the longer
/// length.
pub fn normalized_edit_distance(pred: &str, gt: &str) -> f64 {
    let a: Vec<char> = pred.chars().collect();
    let b: Vec<char> = gt.chars().collect();
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 0.0;
    }
    levenshtein(&a, &b) as f64 / longest as f64
}

fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut row = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(x != y);
            row[j + 1] = substitution.min(prev[j + 1] + 1).min(row[j] + 1);
        }
        core::mem::swap(&mut prev, &mut row);
    }
    prev[b.len()]
}

/// Whitespace tokenization, case preserved.
pub fn tokens(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

fn counts<T: Ord>(items: impl IntoIterator<Item = T>) -> BTreeMap<T, usize> {
    let mut map = BTreeMap::new();
    for item in items {
        *map.entry(item).or_insert(0) += 1;
    }
    map
}

fn clipped_overlap<T: Ord>(pred: &BTreeMap<T, usize>, gt: &BTreeMap<T, usize>) -> usize {
    pred.iter()
        .map(|(k, &n)| n.min(gt.get(k).copied().unwrap_or(0)))
        .sum()
}

/// Bag-of-tokens precision, recall and F1. Two empty inputs agree
/// perfectly; one empty side scores zero.
pub fn token_prf(pred: &str, gt: &str) -> (f64, f64, f64) {
    let p = tokens(pred);
    let g = tokens(gt);
    if p.is_empty() && g.is_empty() {
        return (1.0, 1.0, 1.0);
    }
    if p.is_empty() || g.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let common = clipped_overlap(&counts(p.iter().copied()), &counts(g.iter().copied())) as f64;
    let precision = common / p.len() as f64;
    let recall = common / g.len() as f64;
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    (precision, recall, f1)
}

/// Sentence BLEU with uniform weights over n = 1..=max_n.
///
/// Orders for which the prediction has no n-grams are skipped; a zero
/// precision is floored at [`BLEU_EPSILON`]. The brevity penalty is
/// `exp(1 - |gt| / |pred|)` when the prediction is shorter.
pub fn bleu(pred: &str, gt: &str, max_n: usize) -> f64 {
    let max_n = max_n.max(1);
    let p = tokens(pred);
    let g = tokens(gt);
    if p.is_empty() {
        return if g.is_empty() { 1.0 } else { 0.0 };
    }
    let mut log_sum = 0.0;
    let mut orders = 0usize;
    for n in 1..=max_n {
        if p.len() < n {
            break;
        }
        let pred_grams = counts(p.windows(n));
        let gt_grams = counts(g.windows(n));
        let total = p.len() - n + 1;
        let precision = clipped_overlap(&pred_grams, &gt_grams) as f64 / total as f64;
        log_sum += libm::log(precision.max(BLEU_EPSILON));
        orders += 1;
    }
    let brevity = if p.len() < g.len() {
        libm::exp(1.0 - g.len() as f64 / p.len() as f64)
    } else {
        1.0
    };
    (brevity * libm::exp(log_sum / orders as f64)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn edit_distance_examples() {
        assert_eq!(normalized_edit_distance("abc", "abc"), 0.0);
        assert_eq!(normalized_edit_distance("", "abc"), 1.0);
        assert_eq!(normalized_edit_distance("", ""), 0.0);
        assert!(close(normalized_edit_distance("kitten", "sitting"), 3.0 / 7.0));
        assert!(close(normalized_edit_distance("é", "e"), 1.0));
    }

    #[test]
    fn prf_examples() {
        assert_eq!(token_prf("a b c", "a b c"), (1.0, 1.0, 1.0));
        let (p, r, f) = token_prf("a a b", "a b b");
        assert!(close(p, 2.0 / 3.0) && close(r, 2.0 / 3.0) && close(f, 2.0 / 3.0));
        assert_eq!(token_prf("", "a"), (0.0, 0.0, 0.0));
        assert_eq!(token_prf("A", "a"), (0.0, 0.0, 0.0));
    }

    #[test]
    fn bleu_examples() {
        assert_eq!(bleu("the quick brown fox jumps", "the quick brown fox jumps", 4), 1.0);
        assert!(bleu("a b c d", "w x y z", 4) < 1e-8);
        let expected = libm::exp(1.0 - 4.0 / 3.0);
        assert!(close(bleu("the cat sat", "the cat sat down", 4), expected));
        assert_eq!(bleu("", "", 4), 1.0);
        assert_eq!(bleu("", "x", 4), 0.0);
    }

    #[test]
    fn text_score_f1_invariant() {
        let s = text_score("one two three", "one two four five");
        let expected = 2.0 * s.precision * s.recall / (s.precision + s.recall);
        assert!(close(s.f1, expected));
    }
}
