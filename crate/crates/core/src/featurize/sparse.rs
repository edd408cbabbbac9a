use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index space over word identities and boundary-marked character
/// n-grams. Words occupy `[0, num_words)`, n-grams the rest; both blocks
/// are assigned in sorted order so two builds over the same data agree
/// exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVocab {
    pub word_index: BTreeMap<String, usize>,
    pub ngram_index: BTreeMap<String, usize>,
    pub n_min: usize,
    pub n_max: usize,
}

impl SparseVocab {
    pub fn size(&self) -> usize {
        self.word_index.len() + self.ngram_index.len()
    }
}

/// Multi-hot features for one utterance: per-token active index lists
/// plus the classification-position list (elementwise OR of the tokens).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFeatures {
    pub token_indices: Vec<Vec<usize>>,
    pub cls_indices: Vec<usize>,
    pub dim: usize,
}

/// Character n-grams of `#token#` for n in `[n_min, n_max]`.
pub fn char_ngrams(token: &str, n_min: usize, n_max: usize) -> Vec<String> {
    let marked: Vec<char> = std::iter::once('#')
        .chain(token.chars())
        .chain(std::iter::once('#'))
        .collect();
    let mut grams = Vec::new();
    for n in n_min..=n_max {
        if marked.len() < n {
            break;
        }
        for window in marked.windows(n) {
            grams.push(window.iter().collect());
        }
    }
    grams
}

/// Build the sparse feature space over a tokenized dataset.
pub fn build_sparse_vocab(
    tokenized: &[Vec<String>],
    n_gram_range: (usize, usize),
) -> Result<SparseVocab> {
    if tokenized.is_empty() {
        return Err(Error::Validation(
            "build_sparse_vocab: empty dataset".into(),
        ));
    }
    let (n_min, n_max) = n_gram_range;
    if n_min == 0 || n_min > n_max {
        return Err(Error::Validation(format!(
            "bad n-gram range [{n_min}, {n_max}]"
        )));
    }
    let mut words: BTreeSet<&str> = BTreeSet::new();
    let mut grams: BTreeSet<String> = BTreeSet::new();
    for tokens in tokenized {
        for t in tokens {
            words.insert(t);
            grams.extend(char_ngrams(t, n_min, n_max));
        }
    }
    let word_index: BTreeMap<String, usize> = words
        .into_iter()
        .enumerate()
        .map(|(i, w)| (w.to_string(), i))
        .collect();
    let offset = word_index.len();
    let ngram_index: BTreeMap<String, usize> = grams
        .into_iter()
        .enumerate()
        .map(|(i, g)| (g, offset + i))
        .collect();
    Ok(SparseVocab {
        word_index,
        ngram_index,
        n_min,
        n_max,
    })
}

/// Multi-hot featurize one token sequence. Out-of-vocabulary words
/// contribute only the n-grams they share with the vocabulary, which is
/// what keeps ASR-garbled inputs featurizable at all.
pub fn sparse_featurize(tokens: &[String], vocab: &SparseVocab) -> SparseFeatures {
    let mut token_indices = Vec::with_capacity(tokens.len());
    let mut cls: BTreeSet<usize> = BTreeSet::new();
    for t in tokens {
        let mut active: BTreeSet<usize> = BTreeSet::new();
        if let Some(&i) = vocab.word_index.get(t) {
            active.insert(i);
        }
        for g in char_ngrams(t, vocab.n_min, vocab.n_max) {
            if let Some(&i) = vocab.ngram_index.get(&g) {
                active.insert(i);
            }
        }
        cls.extend(active.iter().copied());
        token_indices.push(active.into_iter().collect());
    }
    SparseFeatures {
        token_indices,
        cls_indices: cls.into_iter().collect(),
        dim: vocab.size(),
    }
}
