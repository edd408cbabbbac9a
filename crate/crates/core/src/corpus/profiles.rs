use crate::corpus::types::{DatasetProfile, Game};
use crate::error::{Error, Result};

/// The four bundled generation profiles, calibrated to the published
/// per-game dataset statistics.
pub fn bundled_profiles() -> Vec<DatasetProfile> {
    vec![
        DatasetProfile {
            name: "planting-poc".into(),
            game: Game::Planting,
            target_num_intents: 14,
            target_num_samples: 1927,
            target_math_related_samples: 452,
            target_avg_words_per_sample: 5.26,
            target_vocab_size: 1314,
            min_samples_per_intent: 22,
            max_samples_per_intent: 555,
            min_words_per_sample: 1,
            max_words_per_sample: 74,
            seed: 1001,
        },
        DatasetProfile {
            name: "watering-poc".into(),
            game: Game::Watering,
            target_num_intents: 13,
            target_num_samples: 2115,
            target_math_related_samples: 599,
            target_avg_words_per_sample: 4.95,
            target_vocab_size: 1267,
            min_samples_per_intent: 25,
            max_samples_per_intent: 601,
            min_words_per_sample: 1,
            max_words_per_sample: 65,
            seed: 1002,
        },
        DatasetProfile {
            name: "planting-deploy".into(),
            game: Game::Planting,
            target_num_intents: 12,
            target_num_samples: 2173,
            target_math_related_samples: 549,
            target_avg_words_per_sample: 4.80,
            target_vocab_size: 772,
            min_samples_per_intent: 4,
            max_samples_per_intent: 1005,
            min_words_per_sample: 1,
            max_words_per_sample: 45,
            seed: 1003,
        },
        DatasetProfile {
            name: "watering-deploy".into(),
            game: Game::Watering,
            target_num_intents: 11,
            target_num_samples: 2122,
            target_math_related_samples: 602,
            target_avg_words_per_sample: 4.48,
            target_vocab_size: 743,
            min_samples_per_intent: 6,
            max_samples_per_intent: 1005,
            min_words_per_sample: 1,
            max_words_per_sample: 44,
            seed: 1004,
        },
    ]
}

pub fn profile_by_name(name: &str) -> Result<DatasetProfile> {
    bundled_profiles()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| {
            Error::Validation(format!(
                "no bundled profile {name:?} (available: planting-poc, watering-poc, planting-deploy, watering-deploy)"
            ))
        })
}
