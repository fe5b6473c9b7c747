//! SARI and ROUGE-L over whitespace-tokenized text.

mod ngram;
mod rouge;
mod sari;
mod score;

pub use ngram::{ngram_counts, NgramCounts};
pub use rouge::{lcs_len, rouge_l};
pub use sari::{sari, sari_components, SariComponents};
pub use score::{load_outputs, score_dataset, EvalInstance, InstanceScore, MetricScore, MetricSet};

/// Optional lowercasing, then a split on Unicode whitespace. Punctuation is
/// left attached; evaluation corpora ship pre-tokenized.
pub fn tokenize(text: &str, lowercase: bool) -> Vec<String> {
    if lowercase {
        text.to_lowercase()
            .split_whitespace()
            .map(str::to_owned)
            .collect()
    } else {
        text.split_whitespace().map(str::to_owned).collect()
    }
}
