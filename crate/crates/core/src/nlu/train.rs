//! NLU training loop: dot-product intent loss with sampled negatives,
//! plus CRF entity loss for the full variant, optimized with Adam.

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, EntitySpan};
use crate::error::{Error, Result};
use crate::featurize::{
    build_sparse_vocab, dense_lookup, sparse_featurize, tokenize, tokenize_with_offsets,
    DenseProvider,
};
use crate::nn::AdamConfig;

use super::model::{NluConfig, NluModel, NluVariant, TAG_B, TAG_I, TAG_O};
use super::similarity_loss;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub epoch_losses: Vec<f64>,
    pub num_samples: usize,
    pub skipped_empty: usize,
    pub warnings: Vec<String>,
}

/// BIO tag per token, from character-overlap with gold "number" spans.
pub fn bio_tags(text: &str, entities: &[EntitySpan]) -> Vec<usize> {
    let tokens = tokenize_with_offsets(text);
    let mut tags = vec![TAG_O; tokens.len()];
    for span in entities.iter().filter(|e| e.entity_type == "number") {
        let mut first = true;
        for (t, (_, start, end)) in tokens.iter().enumerate() {
            if *start < span.end && span.start < *end {
                tags[t] = if first { TAG_B } else { TAG_I };
                first = false;
            }
        }
    }
    tags
}

/// Train an intent/entity model on a labeled dataset. `intents` is the
/// closed registry; every sample's label must appear in it.
pub fn train_nlu(
    data: &Dataset,
    intents: &[String],
    config: &NluConfig,
    provider: &DenseProvider,
) -> Result<(NluModel, TrainReport)> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::Validation("cannot train on an empty dataset".into()));
    }
    if intents.len() < 2 {
        return Err(Error::Validation(
            "intent registry must contain at least two intents".into(),
        ));
    }
    let intent_index = |name: &str| -> Result<usize> {
        intents
            .iter()
            .position(|i| i == name)
            .ok_or_else(|| Error::unknown_name("intent", name, intents))
    };

    let mut warnings = Vec::new();
    let distinct: std::collections::BTreeSet<&str> =
        data.iter().map(|u| u.intent.as_str()).collect();
    if distinct.len() == 1 {
        warnings.push(format!(
            "dataset has a single intent ({}); the classifier will be degenerate",
            data[0].intent
        ));
    }

    let tokenized: Vec<Vec<String>> = data.iter().map(|u| tokenize(&u.text)).collect();
    let vocab = match config.variant {
        NluVariant::Full => Some(build_sparse_vocab(&tokenized, config.ngram_range)?),
        NluVariant::Baseline => None,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = NluModel::new(
        config.clone(),
        intents.to_vec(),
        vocab,
        provider.name(),
        provider.dim(),
        &mut rng,
    );

    // precompute features, labels, and tags
    struct Sample {
        sparse: Option<crate::featurize::SparseFeatures>,
        dense: crate::featurize::DenseFeatures,
        intent: usize,
        tags: Vec<usize>,
    }
    let mut samples = Vec::with_capacity(data.len());
    let mut skipped_empty = 0usize;
    for (u, toks) in data.iter().zip(&tokenized) {
        if toks.is_empty() {
            skipped_empty += 1;
            continue;
        }
        samples.push(Sample {
            sparse: model.vocab.as_ref().map(|v| sparse_featurize(toks, v)),
            dense: dense_lookup(provider, toks, &u.text),
            intent: intent_index(&u.intent)?,
            tags: bio_tags(&u.text, &u.entities),
        });
    }
    if samples.is_empty() {
        return Err(Error::Validation(
            "all samples tokenized to nothing; cannot train".into(),
        ));
    }
    if skipped_empty > 0 {
        warnings.push(format!("skipped {skipped_empty} empty-tokenization samples"));
    }

    let adam = AdamConfig {
        lr: config.learning_rate,
        ..AdamConfig::default()
    };
    let num_intents = intents.len();
    let k = config.num_negatives.min(num_intents - 1);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let mut step = 0usize;

    for _epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut in_batch = 0usize;
        for (pos, &si) in order.iter().enumerate() {
            let s = &samples[si];
            let (encoded, cache) = model.encode(s.sparse.as_ref(), &s.dense);

            // candidates: target first, then sampled distinct negatives
            let mut negs: Vec<usize> = (0..num_intents).filter(|&i| i != s.intent).collect();
            if negs.len() > k {
                negs.partial_shuffle(&mut rng, k);
                negs.truncate(k);
            }
            let mut candidates = Array2::zeros((1 + negs.len(), config.embed_dim));
            candidates
                .row_mut(0)
                .assign(&model.intent_embed.value.row(s.intent));
            for (r, &ni) in negs.iter().enumerate() {
                candidates
                    .row_mut(r + 1)
                    .assign(&model.intent_embed.value.row(ni));
            }
            let (intent_loss, grad_sentence, grad_candidates) =
                similarity_loss(&encoded.sentence, &candidates);
            model
                .intent_embed
                .grad
                .row_mut(s.intent)
                .scaled_add(1.0, &grad_candidates.row(0));
            for (r, &ni) in negs.iter().enumerate() {
                model
                    .intent_embed
                    .grad
                    .row_mut(ni)
                    .scaled_add(1.0, &grad_candidates.row(r + 1));
            }

            let mut total = intent_loss;
            let grad_emissions: Option<Array2<f64>> = match (&mut model.entity, &encoded.emissions)
            {
                (Some(head), Some(em)) if em.nrows() > 0 => {
                    let (nll, g_em) = head.crf.nll_backward(em, &s.tags);
                    total += nll / em.nrows() as f64;
                    Some(g_em / em.nrows() as f64)
                }
                _ => None,
            };
            model.backward(&cache, &grad_sentence, grad_emissions.as_ref());
            epoch_loss += total;
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

    let report = TrainReport {
        epoch_losses,
        num_samples: samples.len(),
        skipped_empty,
        warnings,
    };
    Ok((model, report))
}

/// Embed the whole intent registry once for scoring.
pub(crate) fn intent_logits(model: &NluModel, sentence: &Array1<f64>) -> Vec<f64> {
    (0..model.intents.len())
        .map(|i| model.intent_embed.value.row(i).dot(sentence))
        .collect()
}

/// Deterministic train/eval split by hashing sample ids.
pub fn split_dataset(data: &Dataset, eval_fraction: f64, seed: u64) -> (Dataset, Dataset) {
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let eval_n = ((data.len() as f64) * eval_fraction).round() as usize;
    let eval_idx: std::collections::BTreeSet<usize> = order.into_iter().take(eval_n).collect();
    let mut train = Vec::new();
    let mut eval = Vec::new();
    for (i, u) in data.iter().enumerate() {
        if eval_idx.contains(&i) {
            eval.push(u.clone());
        } else {
            train.push(u.clone());
        }
    }
    (train, eval)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{EntitySpan, Game, Source, Utterance};

    fn utt(id: &str, text: &str, intent: &str, entities: Vec<EntitySpan>) -> Utterance {
        Utterance {
            id: id.into(),
            text: text.into(),
            intent: intent.into(),
            entities,
            game: Game::Planting,
            source: Source::Synthetic,
            session: "s1".into(),
            turn_index: 0,
        }
    }

    #[test]
    fn bio_tags_mark_number_spans() {
        let text = "I planted twenty two flowers";
        let span = EntitySpan {
            start: 10,
            end: 20,
            entity_type: "number".into(),
            value: "twenty two".into(),
        };
        assert_eq!(
            bio_tags(text, &[span]),
            vec![TAG_O, TAG_O, TAG_B, TAG_I, TAG_O]
        );
    }

    #[test]
    fn bio_tags_without_entities_are_all_outside() {
        assert_eq!(bio_tags("hello there", &[]), vec![TAG_O, TAG_O]);
    }

    fn tiny_dataset() -> (Dataset, Vec<String>) {
        let intents: Vec<String> = ["affirm", "deny", "counting"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut data = Vec::new();
        let affirm = ["yes", "yeah sure", "okay yes", "yes please", "sure okay"];
        let deny = ["no", "no way", "nope no", "not now", "no thanks"];
        let counting = [
            "one two three",
            "four five six",
            "seven eight nine",
            "counting one two",
            "three four five",
        ];
        for (i, t) in affirm.iter().enumerate() {
            data.push(utt(&format!("a{i}"), t, "affirm", vec![]));
        }
        for (i, t) in deny.iter().enumerate() {
            data.push(utt(&format!("d{i}"), t, "deny", vec![]));
        }
        for (i, t) in counting.iter().enumerate() {
            data.push(utt(&format!("c{i}"), t, "counting", vec![]));
        }
        (data, intents)
    }

    fn tiny_config() -> NluConfig {
        NluConfig {
            transformer_dim: 16,
            num_layers: 1,
            num_heads: 2,
            ff_dim: 32,
            embed_dim: 16,
            epochs: 30,
            batch_size: 4,
            seed: 7,
            ..NluConfig::full()
        }
    }

    #[test]
    fn loss_decreases_on_tiny_dataset() {
        let (data, intents) = tiny_dataset();
        let provider = DenseProvider::Hash { dim: 8, seed: 1 };
        let (_, report) = train_nlu(&data, &intents, &tiny_config(), &provider).unwrap();
        let first = report.epoch_losses[0];
        let last = *report.epoch_losses.last().unwrap();
        assert!(last < first, "loss did not decrease: {first} -> {last}");
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let provider = DenseProvider::Hash { dim: 8, seed: 1 };
        let err = train_nlu(&vec![], &["a".into(), "b".into()], &tiny_config(), &provider);
        assert!(err.is_err());
    }

    #[test]
    fn unknown_intent_label_is_an_error() {
        let provider = DenseProvider::Hash { dim: 8, seed: 1 };
        let data = vec![utt("x", "hello", "mystery-intent", vec![])];
        let err = train_nlu(&data, &["affirm".into(), "deny".into()], &tiny_config(), &provider)
            .unwrap_err();
        assert!(err.to_string().contains("mystery-intent"));
    }

    #[test]
    fn single_intent_dataset_warns() {
        let provider = DenseProvider::Hash { dim: 8, seed: 1 };
        let data = vec![
            utt("x", "yes", "affirm", vec![]),
            utt("y", "yeah", "affirm", vec![]),
        ];
        let mut cfg = tiny_config();
        cfg.epochs = 2;
        let (_, report) =
            train_nlu(&data, &["affirm".into(), "deny".into()], &cfg, &provider).unwrap();
        assert!(report.warnings.iter().any(|w| w.contains("single intent")));
    }

    #[test]
    fn training_is_deterministic() {
        let (data, intents) = tiny_dataset();
        let provider = DenseProvider::Hash { dim: 8, seed: 1 };
        let mut cfg = tiny_config();
        cfg.epochs = 3;
        let (m1, r1) = train_nlu(&data, &intents, &cfg, &provider).unwrap();
        let (m2, r2) = train_nlu(&data, &intents, &cfg, &provider).unwrap();
        assert_eq!(r1.epoch_losses, r2.epoch_losses);
        assert_eq!(m1.intent_embed.value, m2.intent_embed.value);
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let (data, _) = tiny_dataset();
        let (tr1, ev1) = split_dataset(&data, 0.2, 5);
        let (tr2, ev2) = split_dataset(&data, 0.2, 5);
        assert_eq!(tr1.len(), tr2.len());
        assert_eq!(ev1.len(), ev2.len());
        assert_eq!(tr1.len() + ev1.len(), data.len());
        assert_eq!(ev1.len(), 3); // 15 * 0.2
        let ids: std::collections::BTreeSet<&str> = tr1
            .iter()
            .chain(ev1.iter())
            .map(|u| u.id.as_str())
            .collect();
        assert_eq!(ids.len(), data.len());
    }
}
