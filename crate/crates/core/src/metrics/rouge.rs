/// Longest common subsequence length, `O(|a| |b|)` time and `O(|b|)` space.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// LCS F1 (x100) against the best-matching reference. An empty output or
/// reference scores 0 against it.
pub fn rouge_l<T: PartialEq>(output: &[T], references: &[Vec<T>]) -> f64 {
    references
        .iter()
        .map(|r| {
            let lcs = lcs_len(output, r);
            if lcs == 0 {
                0.0
            } else {
                // 2PR/(P+R) with P = L/|o|, R = L/|r|
                100.0 * 2.0 * lcs as f64 / (output.len() + r.len()) as f64
            }
        })
        .fold(0.0, f64::max)
}
