//! Policy training from episodes: every agent turn becomes one sample
//! (trailing turn features -> gold action), optimized with the same
//! dot-product loss and negative sampling as the intent head.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Actor, EpisodeSet, ScenarioGraph};
use crate::error::{Error, Result};
use crate::nlu::similarity_loss;
use crate::nn::AdamConfig;

use super::policy::{DmConfig, DmModel};
use super::state::{track_action, track_input, DialogueState, StateStep, TurnInput};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DmTrainReport {
    pub epoch_losses: Vec<f64>,
    pub num_samples: usize,
    pub warnings: Vec<String>,
}

/// Replay one episode with gold inputs, emitting `(history, action)`
/// samples at each agent turn.
pub fn episode_samples(
    graph: &ScenarioGraph,
    episode: &crate::corpus::Episode,
    max_history: usize,
) -> Result<Vec<(Vec<StateStep>, String)>> {
    let mut state = DialogueState::new(graph.game, max_history);
    let mut samples = Vec::new();
    for turn in &episode.turns {
        match turn.actor {
            Actor::User => {
                let intent = turn.intent.as_deref().ok_or_else(|| {
                    Error::Validation(format!(
                        "episode {}: user turn without intent",
                        episode.session
                    ))
                })?;
                state = track_input(&state, graph, &TurnInput::UserIntent(intent.to_string()))?;
            }
            Actor::Event => {
                let event = turn.event.as_deref().ok_or_else(|| {
                    Error::Validation(format!(
                        "episode {}: event turn without event",
                        episode.session
                    ))
                })?;
                state = track_input(
                    &state,
                    graph,
                    &TurnInput::Event {
                        name: event.to_string(),
                        number: turn.number,
                    },
                )?;
            }
            Actor::Agent => {
                let action = turn.action.as_deref().ok_or_else(|| {
                    Error::Validation(format!(
                        "episode {}: agent turn without action",
                        episode.session
                    ))
                })?;
                if !state.history.is_empty() {
                    samples.push((
                        state.history.iter().cloned().collect::<Vec<_>>(),
                        action.to_string(),
                    ));
                }
                state = track_action(&state, graph, action, turn.number)?;
            }
        }
    }
    Ok(samples)
}

pub fn train_dm(
    episodes: &EpisodeSet,
    graph: &ScenarioGraph,
    config: &DmConfig,
) -> Result<(DmModel, DmTrainReport)> {
    config.validate()?;
    graph.validate()?;
    if episodes.is_empty() {
        return Err(Error::Validation(
            "cannot train a policy without episodes".into(),
        ));
    }

    let mut warnings = Vec::new();
    let mut samples: Vec<(Vec<StateStep>, usize)> = Vec::new();
    for ep in episodes {
        for (steps, action) in episode_samples(graph, ep, config.max_history)? {
            let ai = graph
                .actions
                .iter()
                .position(|a| a == &action)
                .ok_or_else(|| Error::unknown_name("action", &action, &graph.actions))?;
            samples.push((steps, ai));
        }
    }
    if samples.is_empty() {
        return Err(Error::Validation(
            "episodes contained no trainable agent turns".into(),
        ));
    }
    let distinct: std::collections::BTreeSet<usize> = samples.iter().map(|(_, a)| *a).collect();
    if distinct.len() == 1 {
        warnings.push("episodes exercise a single action; the policy will be degenerate".into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = DmModel::new(config.clone(), graph, &mut rng);

    // featurize once; histories are immutable snapshots
    let features: Vec<Array2<f64>> = samples
        .iter()
        .map(|(steps, _)| model.featurize_state(steps))
        .collect::<Result<_>>()?;

    let adam = AdamConfig {
        lr: config.learning_rate,
        ..AdamConfig::default()
    };
    let num_actions = graph.actions.len();
    let k = config.num_negatives.min(num_actions.saturating_sub(1));
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let mut step = 0usize;

    for _epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut in_batch = 0usize;
        for (pos, &si) in order.iter().enumerate() {
            let (_, target) = samples[si];
            let (u, cache) = model.encode(&features[si]);

            let mut negs: Vec<usize> = (0..num_actions).filter(|&i| i != target).collect();
            if negs.len() > k {
                negs.partial_shuffle(&mut rng, k);
                negs.truncate(k);
            }
            let mut candidates = Array2::zeros((1 + negs.len(), config.embed_dim));
            candidates
                .row_mut(0)
                .assign(&model.action_embed.value.row(target));
            for (r, &ni) in negs.iter().enumerate() {
                candidates
                    .row_mut(r + 1)
                    .assign(&model.action_embed.value.row(ni));
            }
            let (loss, grad_u, grad_candidates) = similarity_loss(&u, &candidates);
            model
                .action_embed
                .grad
                .row_mut(target)
                .scaled_add(1.0, &grad_candidates.row(0));
            for (r, &ni) in negs.iter().enumerate() {
                model
                    .action_embed
                    .grad
                    .row_mut(ni)
                    .scaled_add(1.0, &grad_candidates.row(r + 1));
            }
            model.backward(&cache, &grad_u);
            epoch_loss += loss;
            in_batch += 1;

            if in_batch == config.batch_size || pos + 1 == order.len() {
                step += 1;
                let scale = 1.0 / in_batch as f64;
                for (_, p) in model.named_params_mut() {
                    p.grad *= scale;
                    p.adam_step(step, adam.lr, adam.beta1, adam.beta2, adam.eps);
                    p.zero_grad();
                }
                in_batch = 0;
            }
        }
        epoch_losses.push(epoch_loss / samples.len() as f64);
    }

    let report = DmTrainReport {
        epoch_losses,
        num_samples: samples.len(),
        warnings,
    };
    Ok((model, report))
}
