use std::collections::HashMap;

/// Contiguous n-grams (as token slices) with multiplicities.
pub type NgramCounts<'a> = HashMap<&'a [String], usize>;

/// Empty when `tokens` is shorter than `n`.
pub fn ngram_counts(tokens: &[String], n: usize) -> NgramCounts<'_> {
    assert!(n >= 1, "n-gram order must be at least 1");
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_default() += 1;
    }
    counts
}
