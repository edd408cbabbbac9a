//! Policy persistence on top of the shared model container format.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Game, ScenarioGraph};
use crate::error::{Error, Result};
use crate::nn::ModelContainer;

use super::policy::{DmConfig, DmModel};

#[derive(Serialize, Deserialize)]
struct Metadata {
    kind: String,
    config: DmConfig,
    game: Game,
    intents: Vec<String>,
    events: Vec<String>,
    actions: Vec<String>,
}

pub fn save_dm(model: &DmModel, path: &Path) -> Result<()> {
    let meta = Metadata {
        kind: "dm".to_string(),
        config: model.config.clone(),
        game: model.game,
        intents: model.intents.clone(),
        events: model.events.clone(),
        actions: model.actions.clone(),
    };
    let mut container = ModelContainer::new(serde_json::to_value(&meta)?);
    let mut copy = model.clone();
    for (name, param) in copy.named_params_mut() {
        container.add_tensor(&name, &param.value);
    }
    container.save(path)
}

pub fn load_dm(path: &Path) -> Result<DmModel> {
    let mut container = ModelContainer::load(path)?;
    let meta: Metadata = serde_json::from_value(container.metadata.clone())?;
    if meta.kind != "dm" {
        return Err(Error::Format(format!(
            "expected a dm model, found kind {:?}",
            meta.kind
        )));
    }
    let graph = ScenarioGraph {
        game: meta.game,
        intents: meta.intents,
        events: meta.events,
        actions: meta.actions,
        session_start_action: "greet".into(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut model = DmModel::new(meta.config, &graph, &mut rng);
    for (name, param) in model.named_params_mut() {
        let tensor = container.take_tensor(&name)?;
        if tensor.raw_dim() != param.value.raw_dim() {
            return Err(Error::Format(format!(
                "tensor {name:?} has shape {:?}, expected {:?}",
                tensor.shape(),
                param.value.shape()
            )));
        }
        param.value = tensor;
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_episodes, profile_by_name};
    use crate::dm::{select_action, train_dm, DialogueState};

    #[test]
    fn roundtrip_preserves_selection() {
        let profile = profile_by_name("watering-poc").unwrap();
        let episodes = generate_episodes(&profile, 10, 17).unwrap();
        let graph = ScenarioGraph::for_game(Game::Watering);
        let config = DmConfig {
            transformer_dim: 32,
            ff_dim: 64,
            embed_dim: 32,
            epochs: 5,
            seed: 2,
            ..DmConfig::default()
        };
        let (model, _) = train_dm(&episodes, &graph, &config).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dm.msds");
        save_dm(&model, &path).unwrap();
        let loaded = load_dm(&path).unwrap();
        assert_eq!(loaded.actions, model.actions);

        let samples =
            crate::dm::episode_samples(&graph, &episodes[0], model.config.max_history).unwrap();
        for (steps, _) in samples.iter().take(5) {
            let mut state = DialogueState::new(Game::Watering, model.config.max_history);
            state.history = steps.clone().into_iter().collect();
            let a = select_action(&model, &state).unwrap();
            let b = select_action(&loaded, &state).unwrap();
            assert_eq!(a.action, b.action);
        }
    }
}
