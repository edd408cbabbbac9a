//! Transformer dialogue policy: turn feature rows run through a causal
//! transformer, and the last position is matched against learned action
//! embeddings by dot product.

use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Game, ScenarioGraph};
use crate::error::{Error, Result};
use crate::nn::{Linear, LinearCache, Param, TransformerStack, TransformerStackCache};

use super::state::{DialogueState, StateStep};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DmConfig {
    pub transformer_dim: usize,
    pub num_layers: usize,
    pub num_heads: usize,
    pub ff_dim: usize,
    pub embed_dim: usize,
    /// The policy attends over at most this many trailing turns.
    pub max_history: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub num_negatives: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for DmConfig {
    fn default() -> Self {
        DmConfig {
            transformer_dim: 64,
            num_layers: 1,
            num_heads: 4,
            ff_dim: 128,
            embed_dim: 64,
            max_history: 10,
            epochs: 20,
            batch_size: 32,
            num_negatives: 10,
            learning_rate: 1e-3,
            seed: 0,
        }
    }
}

impl DmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.transformer_dim == 0
            || self.embed_dim == 0
            || self.num_layers == 0
            || self.max_history == 0
            || self.epochs == 0
            || self.batch_size == 0
        {
            return Err(Error::Validation(
                "dm config: dimensions, layers, history, epochs, and batch size must be positive"
                    .into(),
            ));
        }
        if self.transformer_dim % self.num_heads != 0 {
            return Err(Error::Validation(format!(
                "transformer dim {} not divisible by {} heads",
                self.transformer_dim, self.num_heads
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DmModel {
    pub config: DmConfig,
    pub game: Game,
    pub intents: Vec<String>,
    pub events: Vec<String>,
    pub actions: Vec<String>,
    pub input_proj: Linear,
    pub encoder: TransformerStack,
    pub embed: Linear,
    /// One similarity-space row per action.
    pub action_embed: Param,
}

pub struct DmEncodeCache {
    proj_cache: LinearCache,
    stack_cache: TransformerStackCache,
    embed_cache: LinearCache,
    seq_len: usize,
}

impl DmModel {
    pub fn new<R: Rng>(config: DmConfig, graph: &ScenarioGraph, rng: &mut R) -> Self {
        let feat_dim = graph.intents.len() + graph.events.len() + graph.actions.len() + 3;
        DmModel {
            input_proj: Linear::new(feat_dim, config.transformer_dim, rng),
            encoder: TransformerStack::new(
                config.num_layers,
                config.transformer_dim,
                config.num_heads,
                config.ff_dim,
                true,
                rng,
            ),
            embed: Linear::new(config.transformer_dim, config.embed_dim, rng),
            action_embed: Param::xavier(graph.actions.len(), config.embed_dim, rng),
            game: graph.game,
            intents: graph.intents.clone(),
            events: graph.events.clone(),
            actions: graph.actions.clone(),
            config,
        }
    }

    pub fn feat_dim(&self) -> usize {
        self.intents.len() + self.events.len() + self.actions.len() + 3
    }

    /// One feature row per trailing history step: intent one-hot, event
    /// one-hot, previous-action one-hot, then binarized slots.
    pub fn featurize_state(&self, steps: &[StateStep]) -> Result<Array2<f64>> {
        let keep = steps.len().saturating_sub(self.config.max_history);
        let steps = &steps[keep..];
        let ni = self.intents.len();
        let ne = self.events.len();
        let na = self.actions.len();
        let mut rows = Array2::zeros((steps.len(), self.feat_dim()));
        for (t, step) in steps.iter().enumerate() {
            if let Some(intent) = &step.intent {
                let i = self
                    .intents
                    .iter()
                    .position(|x| x == intent)
                    .ok_or_else(|| Error::unknown_name("intent", intent, &self.intents))?;
                rows[[t, i]] = 1.0;
            }
            if let Some(event) = &step.event {
                let i = self
                    .events
                    .iter()
                    .position(|x| x == event)
                    .ok_or_else(|| Error::unknown_name("event", event, &self.events))?;
                rows[[t, ni + i]] = 1.0;
            }
            if let Some(action) = &step.prev_action {
                let i = self
                    .actions
                    .iter()
                    .position(|x| x == action)
                    .ok_or_else(|| Error::unknown_name("action", action, &self.actions))?;
                rows[[t, ni + ne + i]] = 1.0;
            }
            rows[[t, ni + ne + na]] = f64::from(step.has_target);
            rows[[t, ni + ne + na + 1]] = f64::from(step.any_completed);
            rows[[t, ni + ne + na + 2]] = f64::from(step.any_wrong);
        }
        Ok(rows)
    }

    /// Encode feature rows to the action similarity space (last position).
    pub fn encode(&self, rows: &Array2<f64>) -> (Array1<f64>, DmEncodeCache) {
        assert!(rows.nrows() > 0, "cannot encode an empty history");
        let (x, proj_cache) = self.input_proj.forward(rows);
        let (h, stack_cache) = self.encoder.forward(&x);
        let (embedded, embed_cache) = self.embed.forward(&h);
        let seq_len = rows.nrows();
        (
            embedded.row(seq_len - 1).to_owned(),
            DmEncodeCache {
                proj_cache,
                stack_cache,
                embed_cache,
                seq_len,
            },
        )
    }

    pub fn backward(&mut self, cache: &DmEncodeCache, grad_sentence: &Array1<f64>) {
        let mut grad_embedded = Array2::zeros((cache.seq_len, self.config.embed_dim));
        grad_embedded
            .row_mut(cache.seq_len - 1)
            .assign(grad_sentence);
        let g_h = self.embed.backward(&cache.embed_cache, &grad_embedded);
        let g_x = self.encoder.backward(&cache.stack_cache, &g_h);
        self.input_proj.backward(&cache.proj_cache, &g_x);
    }

    pub fn named_params_mut(&mut self) -> Vec<(String, &mut Param)> {
        let mut out: Vec<(String, &mut Param)> = vec![
            ("input_proj.w".into(), &mut self.input_proj.w),
            ("input_proj.b".into(), &mut self.input_proj.b),
        ];
        for (i, layer) in self.encoder.layers.iter_mut().enumerate() {
            let p = format!("enc.{i}");
            out.push((format!("{p}.attn.wq.w"), &mut layer.attn.wq.w));
            out.push((format!("{p}.attn.wq.b"), &mut layer.attn.wq.b));
            out.push((format!("{p}.attn.wk.w"), &mut layer.attn.wk.w));
            out.push((format!("{p}.attn.wk.b"), &mut layer.attn.wk.b));
            out.push((format!("{p}.attn.wv.w"), &mut layer.attn.wv.w));
            out.push((format!("{p}.attn.wv.b"), &mut layer.attn.wv.b));
            out.push((format!("{p}.attn.wo.w"), &mut layer.attn.wo.w));
            out.push((format!("{p}.attn.wo.b"), &mut layer.attn.wo.b));
            out.push((format!("{p}.norm1.gamma"), &mut layer.norm1.gamma));
            out.push((format!("{p}.norm1.beta"), &mut layer.norm1.beta));
            out.push((format!("{p}.ff1.w"), &mut layer.ff1.w));
            out.push((format!("{p}.ff1.b"), &mut layer.ff1.b));
            out.push((format!("{p}.ff2.w"), &mut layer.ff2.w));
            out.push((format!("{p}.ff2.b"), &mut layer.ff2.b));
            out.push((format!("{p}.norm2.gamma"), &mut layer.norm2.gamma));
            out.push((format!("{p}.norm2.beta"), &mut layer.norm2.beta));
        }
        out.push(("embed.w".into(), &mut self.embed.w));
        out.push(("embed.b".into(), &mut self.embed.b));
        out.push(("action_embed".into(), &mut self.action_embed));
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionPrediction {
    pub action: String,
    pub confidence: f64,
    pub ranking: Vec<(String, f64)>,
}

/// Choose the next agent action. A fresh session (no history yet) always
/// opens with the scenario's start action.
pub fn select_action(model: &DmModel, state: &DialogueState) -> Result<ActionPrediction> {
    if state.history.is_empty() {
        return Ok(ActionPrediction {
            action: "greet".to_string(),
            confidence: 1.0,
            ranking: vec![("greet".to_string(), 1.0)],
        });
    }
    let steps: Vec<StateStep> = state.history.iter().cloned().collect();
    let rows = model.featurize_state(&steps)?;
    let (u, _) = model.encode(&rows);
    let logits: Vec<f64> = (0..model.actions.len())
        .map(|i| model.action_embed.value.row(i).dot(&u))
        .collect();
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    let mut ranking: Vec<(String, f64)> = model
        .actions
        .iter()
        .zip(&exps)
        .map(|(a, e)| (a.clone(), e / z))
        .collect();
    ranking.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite confidences"));
    Ok(ActionPrediction {
        action: ranking[0].0.clone(),
        confidence: ranking[0].1,
        ranking,
    })
}
