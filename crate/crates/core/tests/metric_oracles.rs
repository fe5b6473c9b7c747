mod common;

use std::collections::HashMap;

use common::rng;
use rand::seq::SliceRandom;
use rand::Rng;
use ucs::metrics::{lcs_len, rouge_l, sari, EvalInstance};

fn inst(src: &str, out: &str, refs: &[&str]) -> EvalInstance {
    EvalInstance::from_text(src, out, refs.iter().copied(), true).unwrap()
}

/// Exact rational SARI values worked out by exhaustive enumeration of the
/// keep/add/del n-gram tables for n = 1..4.
const FIXTURES: &[(&str, &str, &[&str], f64)] = &[
    ("a b c d", "a b c d", &["a b c d"], 100.0 / 3.0),
    ("a b c d", "w x y z", &["a b c d"], 0.0),
    ("a b c d", "a b d", &["a b d"], 200.0 / 3.0),
    (
        "the cat sat",
        "the cat sat down",
        &["the cat sat down", "a cat sat"],
        31375.0 / 693.0,
    ),
    ("a b a c", "a c", &["a c", "b c"], 775.0 / 18.0),
    (
        "x y z w v",
        "x y q w",
        &["x y w", "x q w v", "y z w"],
        995.0 / 21.0,
    ),
];

#[test]
fn sari_matches_hand_tables() {
    for &(src, out, refs, expect) in FIXTURES {
        let got = sari(&inst(src, out, refs));
        assert!(
            (got - expect).abs() <= 1e-9,
            "{src:?} -> {out:?}: {got} vs {expect}"
        );
    }
}

fn random_tokens(r: &mut impl Rng, vocab: usize, max_len: usize) -> Vec<String> {
    let len = r.random_range(0..=max_len);
    (0..len)
        .map(|_| format!("w{}", r.random_range(0..vocab)))
        .collect()
}

#[test]
fn sari_is_invariant_to_reference_order_and_bounded() {
    let mut r = rng(30);
    for _ in 0..200 {
        let source = random_tokens(&mut r, 6, 10);
        let output = random_tokens(&mut r, 6, 10);
        let mut refs: Vec<Vec<String>> = (0..r.random_range(1..5))
            .map(|_| random_tokens(&mut r, 6, 10))
            .collect();
        let a = sari(&EvalInstance::new(source.clone(), output.clone(), refs.clone()).unwrap());
        refs.shuffle(&mut r);
        let b = sari(&EvalInstance::new(source, output, refs).unwrap());
        assert_eq!(a.to_bits(), b.to_bits());
        assert!((0.0..=100.0).contains(&a));
    }
}

/// Plain recursive LCS with memoization.
fn lcs_memo(a: &[String], b: &[String]) -> usize {
    fn go(
        a: &[String],
        b: &[String],
        i: usize,
        j: usize,
        memo: &mut HashMap<(usize, usize), usize>,
    ) -> usize {
        if i == a.len() || j == b.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = if a[i] == b[j] {
            1 + go(a, b, i + 1, j + 1, memo)
        } else {
            go(a, b, i + 1, j, memo).max(go(a, b, i, j + 1, memo))
        };
        memo.insert((i, j), v);
        v
    }
    go(a, b, 0, 0, &mut HashMap::new())
}

#[test]
fn lcs_matches_memoized_recursion() {
    let mut r = rng(31);
    for _ in 0..1000 {
        let a = random_tokens(&mut r, 4, 12);
        let b = random_tokens(&mut r, 4, 12);
        assert_eq!(lcs_len(&a, &b), lcs_memo(&a, &b), "{a:?} / {b:?}");
    }
}

#[test]
fn rouge_l_never_drops_when_adding_references() {
    let mut r = rng(32);
    for _ in 0..200 {
        let out = random_tokens(&mut r, 5, 10);
        let mut refs = vec![random_tokens(&mut r, 5, 10)];
        let mut last = rouge_l(&out, &refs);
        for _ in 0..4 {
            refs.push(random_tokens(&mut r, 5, 10));
            let now = rouge_l(&out, &refs);
            assert!(now >= last);
            assert!((0.0..=100.0).contains(&now));
            last = now;
        }
    }
}
