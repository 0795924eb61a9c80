//! Detection of generation loops at the end of a token stream.

/// Minimum number of consecutive copies before a loop is reported.
pub const DEFAULT_MIN_REPEATS: usize = 4;
/// Longest loop body, in tokens, that is looked for.
pub const DEFAULT_MAX_PERIOD: usize = 32;

/// Finds a loop running to the end of `tokens`.
///
/// A loop with period `p` starting at `s` means every token from `s + p`
/// onward equals the token `p` positions earlier, and the suffix spans at
/// least `min_repeats` full periods (a trailing partial copy is allowed).
/// Among all loops the one with the earliest start wins, then the shortest
/// period. The returned index is `s + p`: truncating there keeps exactly one
/// copy of the loop body.
///
/// Runs in `O(n * max_period)`.
pub fn detect_repetition<T: PartialEq>(
    tokens: &[T],
    min_repeats: usize,
    max_period: usize,
) -> Option<usize> {
    let min_repeats = min_repeats.max(2);
    let n = tokens.len();
    let mut best: Option<(usize, usize)> = None;
    for period in 1..=max_period.min(n / min_repeats) {
        // length of the trailing run where tokens[i] == tokens[i - period]
        let matched = (period..n)
            .rev()
            .take_while(|&i| tokens[i] == tokens[i - period])
            .count();
        if matched + period < min_repeats * period {
            continue;
        }
        let start = n - matched - period;
        if best.is_none_or(|(s, _)| start < s) {
            best = Some((start, period));
        }
    }
    best.map(|(start, period)| start + period)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chars(s: &str) -> alloc::vec::Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn abc_loop() {
        assert_eq!(detect_repetition(&chars("ABCABCABC"), 3, 5), Some(3));
    }

    #[test]
    fn no_loop() {
        assert_eq!(detect_repetition(&chars("ABCD"), 3, 5), None);
    }

    #[test]
    fn period_one() {
        assert_eq!(detect_repetition(&['A'; 100], 3, 32), Some(1));
    }

    #[test]
    fn loop_after_prefix_with_partial_tail() {
        // XY + (abc)x4 + ab
        assert_eq!(detect_repetition(&chars("XYabcabcabcabcab"), 4, 8), Some(5));
        // three copies are not enough at the default threshold
        assert_eq!(detect_repetition(&chars("XYabcabcabc"), 4, 8), None);
    }

    #[test]
    fn period_cap_is_respected() {
        let body = chars("abcdefgh");
        let stream: alloc::vec::Vec<char> = body.iter().cycle().take(40).copied().collect();
        assert_eq!(detect_repetition(&stream, 4, 7), None);
        assert_eq!(detect_repetition(&stream, 4, 8), Some(8));
    }

    #[test]
    fn empty_input() {
        assert_eq!(detect_repetition::<u8>(&[], 4, 32), None);
    }
}
