//! End-to-end pipeline evaluation: replay held-out utterances and
//! episodes through (optional) ASR noise, the NLU model, and the policy,
//! and measure degradation per stage.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::asr_sim::{corrupt, word_error_rate, NoiseChannelConfig};
use crate::corpus::{Actor, Dataset, EpisodeSet, ScenarioGraph};
use crate::dm::{select_action, track_action, track_input, DialogueState, DmModel, TurnInput};
use crate::error::{Error, Result};
use crate::featurize::{tokenize, DenseProvider};
use crate::nlu::{predict_intent, NluModel};

use super::metrics::{micro_f1, per_class_metrics, ClassMetrics};

/// One evaluation condition: the clean transcripts, or transcripts run
/// through a configured noise channel.
#[derive(Debug, Clone)]
pub struct PipelineCondition {
    pub name: String,
    pub noise: Option<NoiseChannelConfig>,
}

impl PipelineCondition {
    pub fn clean() -> Self {
        PipelineCondition {
            name: "clean".into(),
            noise: None,
        }
    }

    pub fn noisy(name: &str, noise: NoiseChannelConfig) -> Self {
        PipelineCondition {
            name: name.into(),
            noise: Some(noise),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DmEvalReport {
    pub action_accuracy: f64,
    pub num_agent_turns: usize,
    pub num_episodes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub condition: String,
    /// Aggregate WER of the transcripts actually scored (0 when clean).
    pub measured_wer: f64,
    pub intent_micro_f1: f64,
    pub num_utterances: usize,
    pub per_intent: BTreeMap<String, ClassMetrics>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gold_intents: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub predicted_intents: Vec<String>,
    /// Human transcriptions, parallel to the intent lists.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reference_texts: Vec<String>,
    /// What the (simulated) recognizer heard; equals the reference when clean.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub asr_texts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dm: Option<DmEvalReport>,
}

impl EvalReport {
    /// Copy without the per-utterance label lists, for compact output.
    pub fn without_transcripts(&self) -> EvalReport {
        EvalReport {
            gold_intents: Vec::new(),
            predicted_intents: Vec::new(),
            reference_texts: Vec::new(),
            asr_texts: Vec::new(),
            ..self.clone()
        }
    }
}

/// Run one condition over held-out utterances (intent metrics) and,
/// when a policy is supplied, teacher-forced episodes (action accuracy:
/// state updates use predicted intents, but the gold action is executed
/// so errors do not compound across turns).
pub fn run_condition(
    data: &Dataset,
    episodes: Option<&EpisodeSet>,
    nlu: &NluModel,
    provider: &DenseProvider,
    dm: Option<&DmModel>,
    condition: &PipelineCondition,
) -> Result<EvalReport> {
    if data.is_empty() {
        return Err(Error::Validation("cannot evaluate on zero utterances".into()));
    }
    if dm.is_some() && episodes.is_none() {
        return Err(Error::Validation(
            "policy evaluation requires episodes; none were supplied".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(
        condition.noise.as_ref().map(|n| n.seed).unwrap_or(0),
    );
    let mut gold = Vec::with_capacity(data.len());
    let mut pred = Vec::with_capacity(data.len());
    let mut reference_texts = Vec::with_capacity(data.len());
    let mut asr_texts = Vec::with_capacity(data.len());
    let mut total_edits = 0usize;
    let mut total_ref = 0usize;
    for u in data {
        let reference = tokenize(&u.text);
        if reference.is_empty() {
            continue;
        }
        let (hyp_tokens, hyp_text) = match &condition.noise {
            Some(noise) => {
                let h = corrupt(&reference, noise, &mut rng);
                let text = h.join(" ");
                (h, text)
            }
            None => (reference.clone(), u.text.clone()),
        };
        let align = word_error_rate(&reference, &hyp_tokens)?;
        total_edits += align.substitutions + align.deletions + align.insertions;
        total_ref += align.reference_len;
        let p = predict_intent(nlu, provider, &hyp_text)?;
        gold.push(u.intent.clone());
        pred.push(p.intent);
        reference_texts.push(u.text.clone());
        asr_texts.push(hyp_text);
    }
    let intent_micro_f1 = micro_f1(&gold, &pred)?;
    let per_intent = per_class_metrics(&gold, &pred)?;
    let measured_wer = if total_ref == 0 {
        0.0
    } else {
        total_edits as f64 / total_ref as f64
    };

    let dm_report = match (dm, episodes) {
        (Some(policy), Some(eps)) => Some(run_dm_condition(
            eps,
            nlu,
            provider,
            policy,
            condition,
            &mut rng,
        )?),
        _ => None,
    };

    Ok(EvalReport {
        condition: condition.name.clone(),
        measured_wer,
        intent_micro_f1,
        num_utterances: gold.len(),
        per_intent,
        gold_intents: gold,
        predicted_intents: pred,
        reference_texts,
        asr_texts,
        dm: dm_report,
    })
}

fn run_dm_condition(
    episodes: &EpisodeSet,
    nlu: &NluModel,
    provider: &DenseProvider,
    policy: &DmModel,
    condition: &PipelineCondition,
    rng: &mut ChaCha8Rng,
) -> Result<DmEvalReport> {
    if episodes.is_empty() {
        return Err(Error::Validation(
            "policy evaluation requires at least one episode".into(),
        ));
    }
    let graph = ScenarioGraph::for_game(policy.game);
    let mut correct = 0usize;
    let mut total = 0usize;
    for ep in episodes {
        let mut state = DialogueState::new(policy.game, policy.config.max_history);
        for turn in &ep.turns {
            match turn.actor {
                Actor::User => {
                    let text = turn.text.as_deref().ok_or_else(|| {
                        Error::Validation(format!(
                            "episode {}: user turn without text",
                            ep.session
                        ))
                    })?;
                    let heard = match &condition.noise {
                        Some(noise) => corrupt(&tokenize(text), noise, rng).join(" "),
                        None => text.to_string(),
                    };
                    let p = predict_intent(nlu, provider, &heard)?;
                    // a predicted intent outside this game's registry
                    // (fallback included) degrades to out-of-scope
                    let intent = if graph.intents.iter().any(|i| i == &p.intent) {
                        p.intent
                    } else {
                        "out-of-scope".to_string()
                    };
                    state = track_input(&state, &graph, &TurnInput::UserIntent(intent))?;
                }
                Actor::Event => {
                    let event = turn.event.as_deref().ok_or_else(|| {
                        Error::Validation(format!(
                            "episode {}: event turn without event",
                            ep.session
                        ))
                    })?;
                    state = track_input(
                        &state,
                        &graph,
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
                            ep.session
                        ))
                    })?;
                    if !state.history.is_empty() {
                        let predicted = select_action(policy, &state)?;
                        total += 1;
                        if predicted.action == action {
                            correct += 1;
                        }
                    }
                    state = track_action(&state, &graph, action, turn.number)?;
                }
            }
        }
    }
    if total == 0 {
        return Err(Error::Validation(
            "episodes contained no scorable agent turns".into(),
        ));
    }
    Ok(DmEvalReport {
        action_accuracy: correct as f64 / total as f64,
        num_agent_turns: total,
        num_episodes: episodes.len(),
    })
}

/// Side-by-side summary of a clean and a degraded run, with error
/// propagation expressed in percentage points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct E2eSummary {
    pub clean: EvalReport,
    pub degraded: EvalReport,
    pub nlu_drop_points: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dm_drop_points: Option<f64>,
}

pub fn summarize_e2e(clean: EvalReport, degraded: EvalReport) -> E2eSummary {
    let nlu_drop_points = (clean.intent_micro_f1 - degraded.intent_micro_f1) * 100.0;
    let dm_drop_points = match (&clean.dm, &degraded.dm) {
        (Some(c), Some(d)) => Some((c.action_accuracy - d.action_accuracy) * 100.0),
        _ => None,
    };
    E2eSummary {
        clean,
        degraded,
        nlu_drop_points,
        dm_drop_points,
    }
}
