use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::types::{is_math_related, Dataset, DatasetStats};
use crate::error::{Error, Result};
use crate::featurize::tokenize;

/// Descriptive statistics over a dataset: sample and intent counts,
/// words-per-sample extremes and mean, vocabulary over lowercased tokens.
pub fn compute_stats(dataset: &Dataset) -> Result<DatasetStats> {
    if dataset.is_empty() {
        return Err(Error::Validation("compute_stats: empty dataset".into()));
    }
    let mut per_intent: BTreeMap<&str, usize> = BTreeMap::new();
    let mut vocab: BTreeSet<String> = BTreeSet::new();
    let mut total_words = 0usize;
    let mut min_words = usize::MAX;
    let mut max_words = 0usize;
    let mut math = 0usize;

    for utt in dataset {
        *per_intent.entry(utt.intent.as_str()).or_insert(0) += 1;
        if is_math_related(&utt.intent) {
            math += 1;
        }
        let tokens = tokenize(&utt.text);
        total_words += tokens.len();
        min_words = min_words.min(tokens.len());
        max_words = max_words.max(tokens.len());
        vocab.extend(tokens);
    }

    let num_samples = dataset.len();
    let num_intents = per_intent.len();
    let min_per_intent = per_intent.values().copied().min().unwrap_or(0);
    let max_per_intent = per_intent.values().copied().max().unwrap_or(0);

    Ok(DatasetStats {
        num_intents,
        num_samples,
        math_related_samples: math,
        min_samples_per_intent: min_per_intent,
        max_samples_per_intent: max_per_intent,
        avg_samples_per_intent: num_samples as f64 / num_intents as f64,
        min_words_per_sample: min_words,
        max_words_per_sample: max_words,
        avg_words_per_sample: total_words as f64 / num_samples as f64,
        vocab_size: vocab.len(),
        total_words,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::types::{Game, Source, Utterance};

    fn utt(text: &str, intent: &str) -> Utterance {
        Utterance {
            id: "u0".into(),
            text: text.into(),
            intent: intent.into(),
            entities: vec![],
            game: Game::Planting,
            source: Source::Synthetic,
            session: "s0".into(),
            turn_index: 0,
        }
    }

    #[test]
    fn single_utterance() {
        let s = compute_stats(&vec![utt("six", "counting")]).unwrap();
        assert_eq!(s.num_intents, 1);
        assert_eq!(s.num_samples, 1);
        assert_eq!(s.avg_words_per_sample, 1.0);
        assert_eq!(s.vocab_size, 1);
        assert_eq!(s.math_related_samples, 1);
    }

    #[test]
    fn average_and_total() {
        let data = vec![
            utt("one two", "affirm"),
            utt("a b c d", "affirm"),
            utt("p q r s t u", "deny"),
        ];
        let s = compute_stats(&data).unwrap();
        assert_eq!(s.avg_words_per_sample, 4.0);
        assert_eq!(s.total_words, 12);
        assert_eq!(s.min_words_per_sample, 2);
        assert_eq!(s.max_words_per_sample, 6);
    }

    #[test]
    fn empty_dataset_errors() {
        assert!(compute_stats(&vec![]).is_err());
    }
}
