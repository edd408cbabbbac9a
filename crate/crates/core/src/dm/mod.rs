//! Dialogue management: pure-function state tracking over scenario
//! registries and a transformer policy over the turn history.

mod policy;
mod serialize;
mod state;
mod train;

pub use policy::{select_action, ActionPrediction, DmConfig, DmModel};
pub use serialize::{load_dm, save_dm};
pub use state::{track_action, track_input, DialogueState, StateStep, TurnInput};
pub use train::{episode_samples, train_dm, DmTrainReport};
