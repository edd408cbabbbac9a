//! Dataset schema, synthetic math-game corpus generation calibrated to
//! per-game target statistics, episode synthesis from bundled scenario
//! graphs, and the JSONL interchange formats.

mod episodes;
mod generator;
pub mod grammar;
mod io;
mod profiles;
mod registry;
mod scenario;
mod stats;
mod types;

pub use episodes::{
    generate_episodes, load_episodes, save_episodes, Actor, DialogueTurn, Episode, EpisodeSet,
};
pub use generator::{generate_dataset, STAT_TOLERANCE};
pub use io::{header_path, load_dataset, load_header, save_dataset, DatasetHeader};
pub use profiles::{bundled_profiles, profile_by_name};
pub use registry::{action_registry, event_registry, intent_registry};
pub use scenario::ScenarioGraph;
pub use stats::compute_stats;
pub use types::{
    is_math_related, Dataset, DatasetProfile, DatasetStats, EntitySpan, Game, Source, Utterance,
    MATH_RELATED_INTENTS,
};
