//! Inference: ranked intent prediction with an out-of-scope fallback,
//! and CRF entity decoding back to character spans.

use serde::{Deserialize, Serialize};

use crate::corpus::EntitySpan;
use crate::error::{Error, Result};
use crate::featurize::{tokenize_with_offsets, DenseProvider};

use super::model::{NluModel, NluVariant, TAG_B, TAG_I};
use super::train::intent_logits;

pub const FALLBACK_INTENT: &str = "out-of-scope";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntentPrediction {
    pub intent: String,
    pub confidence: f64,
    /// All intents with softmax confidences, best first.
    pub ranking: Vec<(String, f64)>,
}

pub fn predict_intent(
    model: &NluModel,
    provider: &DenseProvider,
    text: &str,
) -> Result<IntentPrediction> {
    let (tokens, sparse, dense) = model.featurize(text, provider);
    if tokens.is_empty() {
        // nothing recognizable was said
        return Ok(IntentPrediction {
            intent: FALLBACK_INTENT.to_string(),
            confidence: 1.0,
            ranking: vec![(FALLBACK_INTENT.to_string(), 1.0)],
        });
    }
    let (encoded, _) = model.encode(sparse.as_ref(), &dense);
    let logits = intent_logits(model, &encoded.sentence);
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = exps.iter().sum();

    let mut ranking: Vec<(String, f64)> = model
        .intents
        .iter()
        .zip(&exps)
        .map(|(name, e)| (name.clone(), e / z))
        .collect();
    // stable sort keeps registry order on exact ties
    ranking.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite confidences"));

    let (top_intent, top_conf) = ranking[0].clone();
    let intent = if top_conf < model.config.fallback_threshold {
        FALLBACK_INTENT.to_string()
    } else {
        top_intent
    };
    Ok(IntentPrediction {
        intent,
        confidence: top_conf,
        ranking,
    })
}

/// Decode "number" entity spans. Only the full variant has an entity
/// head; the baseline reports `Unsupported`.
pub fn predict_entities(
    model: &NluModel,
    provider: &DenseProvider,
    text: &str,
) -> Result<Vec<EntitySpan>> {
    if model.config.variant == NluVariant::Baseline {
        return Err(Error::Unsupported(
            "the baseline variant has no entity head".into(),
        ));
    }
    let head = model
        .entity
        .as_ref()
        .ok_or_else(|| Error::Format("full model is missing its entity head".into()))?;

    let offsets = tokenize_with_offsets(text);
    if offsets.is_empty() {
        return Ok(Vec::new());
    }
    let (_, sparse, dense) = model.featurize(text, provider);
    let (encoded, _) = model.encode(sparse.as_ref(), &dense);
    let emissions = encoded
        .emissions
        .ok_or_else(|| Error::Format("entity head produced no emissions".into()))?;
    let mut tags = head.crf.viterbi(&emissions);

    // repair: an I without a preceding B or I opens a new span
    for t in 0..tags.len() {
        if tags[t] == TAG_I && (t == 0 || (tags[t - 1] != TAG_B && tags[t - 1] != TAG_I)) {
            tags[t] = TAG_B;
        }
    }

    let chars: Vec<char> = text.chars().collect();
    let mut spans = Vec::new();
    let mut current: Option<(usize, usize)> = None;
    for (t, &tag) in tags.iter().enumerate() {
        let (_, start, end) = offsets[t];
        match tag {
            TAG_B => {
                if let Some((s, e)) = current.take() {
                    spans.push((s, e));
                }
                current = Some((start, end));
            }
            TAG_I => {
                if let Some((_, e)) = &mut current {
                    *e = end;
                }
            }
            _ => {
                if let Some((s, e)) = current.take() {
                    spans.push((s, e));
                }
            }
        }
    }
    if let Some((s, e)) = current.take() {
        spans.push((s, e));
    }

    Ok(spans
        .into_iter()
        .map(|(start, end)| EntitySpan {
            start,
            end,
            entity_type: "number".to_string(),
            value: chars[start..end].iter().collect::<String>().to_lowercase(),
        })
        .collect())
}
