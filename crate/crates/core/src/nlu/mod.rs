//! Natural language understanding: joint intent classification and
//! number-entity recognition, with a dense-only baseline for comparison.

mod crf;
mod loss;
pub mod model;
mod predict;
mod serialize;
mod train;

pub use crf::Crf;
pub use loss::similarity_loss;
pub use model::{EntityHead, NluConfig, NluModel, NluVariant, ENTITY_TAGS};
pub use predict::{predict_entities, predict_intent, IntentPrediction, FALLBACK_INTENT};
pub use serialize::{load_nlu, save_nlu};
pub use train::{bio_tags, split_dataset, train_nlu, TrainReport};
