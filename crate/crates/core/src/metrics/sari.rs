//! SARI with these exact component definitions, for n = 1..=4:
//!
//! * keep: multisets `min(I, O)` vs `min(I, r)`, F1;
//! * add: sets `O \ I` vs `(union of R_j) \ I`, F1;
//! * del: multisets `max(I - O, 0)` vs `max(I - r, 0)`, precision only;
//!
//! where `I`, `O`, `R_j` are source, output and reference n-gram counts and
//! `r(g) = sum_j R_j(g) / |R|`. Every `0/0` is 0. The score is
//! `100 * (mean keep + mean add + mean del) / 3`.
//!
//! Fractional reference counts are handled by scaling every multiset by
//! `|R|`, so all sums are exact integers; the result therefore does not depend
//! on reference order or hash iteration order.

use std::collections::HashSet;

use super::ngram::ngram_counts;
use super::EvalInstance;

const MAX_ORDER: usize = 4;

/// Per-component means over n-gram orders, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SariComponents {
    pub keep: f64,
    pub add: f64,
    pub del: f64,
}

impl SariComponents {
    pub fn score(&self) -> f64 {
        100.0 * (self.keep + self.add + self.del) / 3.0
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn sari_components(instance: &EvalInstance) -> SariComponents {
    let refs = &instance.references;
    let m = refs.len() as u64;
    let (mut keep, mut add, mut del) = (0.0, 0.0, 0.0);
    for n in 1..=MAX_ORDER {
        let src = ngram_counts(&instance.source, n);
        let out = ngram_counts(&instance.output, n);
        let ref_counts: Vec<_> = refs.iter().map(|r| ngram_counts(r, n)).collect();
        let ref_sum = |g: &[String]| -> u64 {
            ref_counts
                .iter()
                .map(|r| r.get(g).copied().unwrap_or(0) as u64)
                .sum()
        };

        // keep and del only involve n-grams present in the source
        let (mut keep_cand, mut keep_ref, mut keep_hit) = (0u64, 0u64, 0u64);
        let (mut del_cand, mut del_hit) = (0u64, 0u64);
        for (&g, &i) in &src {
            let i = i as u64;
            let o = out.get(g).copied().unwrap_or(0) as u64;
            let s = ref_sum(g);
            let kept = i.min(o);
            let kept_ref = (i * m).min(s);
            keep_cand += kept;
            keep_ref += kept_ref;
            keep_hit += (kept * m).min(kept_ref);

            let deleted = i - kept;
            let deleted_ref = (i * m).saturating_sub(s);
            del_cand += deleted;
            del_hit += (deleted * m).min(deleted_ref);
        }
        keep += f1(ratio(keep_hit, keep_cand * m), ratio(keep_hit, keep_ref));
        del += ratio(del_hit, del_cand * m);

        let add_cand: HashSet<&[String]> = out
            .keys()
            .copied()
            .filter(|g| !src.contains_key(g))
            .collect();
        let add_ref: HashSet<&[String]> = ref_counts
            .iter()
            .flat_map(|r| r.keys().copied())
            .filter(|g| !src.contains_key(g))
            .collect();
        let add_hit = add_cand.intersection(&add_ref).count() as u64;
        add += f1(
            ratio(add_hit, add_cand.len() as u64),
            ratio(add_hit, add_ref.len() as u64),
        );
    }
    let orders = MAX_ORDER as f64;
    SariComponents {
        keep: keep / orders,
        add: add / orders,
        del: del / orders,
    }
}

/// SARI in `[0, 100]`.
pub fn sari(instance: &EvalInstance) -> f64 {
    sari_components(instance).score()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(src: &str, out: &str, refs: &[&str]) -> EvalInstance {
        EvalInstance::from_text(src, out, refs.iter().copied(), true).unwrap()
    }

    #[test]
    fn identity_keeps_everything() {
        let c = sari_components(&inst("a b c d", "a b c d", &["a b c d"]));
        assert_eq!((c.keep, c.add, c.del), (1.0, 0.0, 0.0));
        assert!((c.score() - 100.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unrelated_output_scores_zero() {
        assert_eq!(sari(&inst("a b c d", "w x y z", &["a b c d"])), 0.0);
    }

    #[test]
    fn deletion_trace() {
        // keep (1+1+0+0)/4, add (0+1+1+0)/4, del (1+1+1+1)/4
        let c = sari_components(&inst("a b c d", "a b d", &["a b d"]));
        assert_eq!((c.keep, c.add, c.del), (0.5, 0.5, 1.0));
    }
}
