use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Game {
    Planting,
    Watering,
}

impl Game {
    pub fn as_str(self) -> &'static str {
        match self {
            Game::Planting => "planting",
            Game::Watering => "watering",
        }
    }
}

impl std::str::FromStr for Game {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "planting" => Ok(Game::Planting),
            "watering" => Ok(Game::Watering),
            other => Err(Error::Validation(format!("unknown game {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Human,
    Asr,
    Synthetic,
}

/// A typed character span inside an utterance, e.g. the number words in
/// "plant thirteen flowers".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub entity_type: String,
    pub value: String,
}

/// One annotated user sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub text: String,
    pub intent: String,
    #[serde(default)]
    pub entities: Vec<EntitySpan>,
    pub game: Game,
    pub source: Source,
    pub session: String,
    pub turn_index: u32,
}

pub type Dataset = Vec<Utterance>;

impl Utterance {
    /// Schema validation against an intent registry.
    pub fn validate(&self, registry: &[String]) -> Result<()> {
        if self.text.trim().is_empty() {
            return Err(Error::Validation(format!(
                "utterance {}: empty text",
                self.id
            )));
        }
        if !registry.iter().any(|i| *i == self.intent) {
            return Err(Error::unknown_name("intent", &self.intent, registry));
        }
        let len = self.text.chars().count();
        let mut spans: Vec<&EntitySpan> = self.entities.iter().collect();
        spans.sort_by_key(|s| s.start);
        let mut prev_end = 0usize;
        for span in spans {
            if span.start >= span.end || span.end > len {
                return Err(Error::Validation(format!(
                    "utterance {}: entity span {}..{} out of range for text length {len}",
                    self.id, span.start, span.end
                )));
            }
            if span.start < prev_end {
                return Err(Error::Validation(format!(
                    "utterance {}: overlapping entity spans",
                    self.id
                )));
            }
            if span.value.is_empty() {
                return Err(Error::Validation(format!(
                    "utterance {}: empty entity value",
                    self.id
                )));
            }
            prev_end = span.end;
        }
        Ok(())
    }
}

/// Generation targets calibrated to the published per-game statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProfile {
    pub name: String,
    pub game: Game,
    pub target_num_intents: usize,
    pub target_num_samples: usize,
    pub target_math_related_samples: usize,
    pub target_avg_words_per_sample: f64,
    pub target_vocab_size: usize,
    pub min_samples_per_intent: usize,
    pub max_samples_per_intent: usize,
    pub min_words_per_sample: usize,
    pub max_words_per_sample: usize,
    pub seed: u64,
}

impl DatasetProfile {
    pub fn validate(&self) -> Result<()> {
        if self.target_num_intents == 0
            || self.target_num_samples == 0
            || self.target_math_related_samples == 0
            || self.target_vocab_size == 0
            || self.target_avg_words_per_sample <= 0.0
        {
            return Err(Error::UnsatisfiableProfile(format!(
                "profile {}: all targets must be positive",
                self.name
            )));
        }
        if self.min_samples_per_intent > self.max_samples_per_intent {
            return Err(Error::UnsatisfiableProfile(format!(
                "profile {}: min samples per intent {} > max {}",
                self.name, self.min_samples_per_intent, self.max_samples_per_intent
            )));
        }
        if self.min_words_per_sample > self.max_words_per_sample {
            return Err(Error::UnsatisfiableProfile(format!(
                "profile {}: min words per sample {} > max {}",
                self.name, self.min_words_per_sample, self.max_words_per_sample
            )));
        }
        if self.target_math_related_samples >= self.target_num_samples {
            return Err(Error::UnsatisfiableProfile(format!(
                "profile {}: math-related target must be below the sample target",
                self.name
            )));
        }
        if self.min_samples_per_intent * self.target_num_intents > self.target_num_samples
            || self.max_samples_per_intent * self.target_num_intents < self.target_num_samples
        {
            return Err(Error::UnsatisfiableProfile(format!(
                "profile {}: per-intent bounds cannot reach {} samples over {} intents",
                self.name, self.target_num_samples, self.target_num_intents
            )));
        }
        Ok(())
    }
}

/// Computed (never targeted) corpus measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub num_intents: usize,
    pub num_samples: usize,
    pub math_related_samples: usize,
    pub min_samples_per_intent: usize,
    pub max_samples_per_intent: usize,
    pub avg_samples_per_intent: f64,
    pub min_words_per_sample: usize,
    pub max_words_per_sample: usize,
    pub avg_words_per_sample: f64,
    pub vocab_size: usize,
    pub total_words: usize,
}

/// Intents counted as math-related (membership chosen from the game
/// descriptions; the published statistics count these but do not define
/// the set).
pub const MATH_RELATED_INTENTS: [&str; 4] =
    ["ask-number", "counting", "answer-flowers", "answer-water"];

pub fn is_math_related(intent: &str) -> bool {
    MATH_RELATED_INTENTS.contains(&intent)
}
