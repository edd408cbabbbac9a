//! Simulated speech-recognition noise channel and word-error-rate metrics.
//!
//! Real ASR engines are out of scope; a parametric corruption channel with
//! a confusion lexicon stands in for them, so error-propagation experiments
//! run offline and reproduce exactly from a seed.

mod calibrate;
mod corrupt;
mod lexicon;
mod wer;

pub use calibrate::{calibrate, measure_wer};
pub use corrupt::corrupt;
pub use lexicon::default_confusions;
pub use wer::{word_error_rate, AlignmentResult};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the word-level noise channel.
///
/// Per reference word: substitute with probability `p_sub` (drawing from
/// the confusion lexicon when the word has an entry, otherwise from the
/// fallback unigram pool, never the word itself), or delete with
/// probability `p_del`. After every position a pool word is inserted with
/// probability `p_ins`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseChannelConfig {
    pub p_sub: f64,
    pub p_del: f64,
    pub p_ins: f64,
    /// Word (or short phrase) -> plausible misrecognitions. Values may be
    /// multi-word.
    pub confusions: BTreeMap<String, Vec<String>>,
    /// Fallback substitution / insertion source: corpus unigrams with
    /// counts.
    pub unigram_pool: Vec<(String, u32)>,
    pub seed: u64,
}

impl NoiseChannelConfig {
    /// Channel with zero error rates and the bundled confusion lexicon.
    pub fn silent(seed: u64) -> Self {
        NoiseChannelConfig {
            p_sub: 0.0,
            p_del: 0.0,
            p_ins: 0.0,
            confusions: default_confusions(),
            unigram_pool: Vec::new(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p_sub", self.p_sub),
            ("p_del", self.p_del),
            ("p_ins", self.p_ins),
        ] {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::Validation(format!(
                    "{name} = {p} out of range [0, 1]"
                )));
            }
        }
        if self.p_sub + self.p_del > 1.0 {
            return Err(Error::Validation(format!(
                "p_sub + p_del = {} exceeds 1",
                self.p_sub + self.p_del
            )));
        }
        if self.p_ins >= 1.0 {
            return Err(Error::Validation("p_ins must be < 1".into()));
        }
        Ok(())
    }

    /// Build the fallback pool from corpus token counts.
    pub fn with_pool_from_tokens<'a, I: IntoIterator<Item = &'a str>>(mut self, tokens: I) -> Self {
        let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
        for t in tokens {
            *counts.entry(t).or_insert(0) += 1;
        }
        self.unigram_pool = counts
            .into_iter()
            .map(|(w, c)| (w.to_string(), c))
            .collect();
        self
    }
}
