//! Intent and entity model. The full variant runs sparse (word +
//! character n-gram) and dense features through a shared transformer
//! encoder with a dot-product intent head and a CRF entity head; the
//! baseline variant classifies intents from the dense sentence vector
//! alone, standing in for a plain pretrained-encoder classifier.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::featurize::{
    dense_lookup, sparse_featurize, tokenize, DenseFeatures, DenseProvider, SparseFeatures,
    SparseVocab,
};
use crate::nn::{
    Linear, LinearCache, Param, SparseLinear, SparseLinearCache, TransformerStack,
    TransformerStackCache,
};

use super::crf::Crf;

/// BIO tags for the single "number" entity type.
pub const ENTITY_TAGS: [&str; 3] = ["O", "B-number", "I-number"];
pub const TAG_O: usize = 0;
pub const TAG_B: usize = 1;
pub const TAG_I: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NluVariant {
    /// Sparse + dense features, intent and entity heads.
    Full,
    /// Dense sentence vector only, intent head only.
    Baseline,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NluConfig {
    pub variant: NluVariant,
    pub transformer_dim: usize,
    pub num_layers: usize,
    pub num_heads: usize,
    pub ff_dim: usize,
    /// Dimension of the shared similarity space for intents.
    pub embed_dim: usize,
    pub ngram_range: (usize, usize),
    pub epochs: usize,
    pub batch_size: usize,
    pub num_negatives: usize,
    pub learning_rate: f64,
    /// Top intent confidences below this fall back to out-of-scope.
    pub fallback_threshold: f64,
    pub seed: u64,
}

impl NluConfig {
    pub fn full() -> Self {
        NluConfig {
            variant: NluVariant::Full,
            transformer_dim: 128,
            num_layers: 2,
            num_heads: 4,
            ff_dim: 256,
            embed_dim: 256,
            ngram_range: (3, 5),
            epochs: 20,
            batch_size: 32,
            num_negatives: 10,
            learning_rate: 1e-3,
            fallback_threshold: 0.3,
            seed: 0,
        }
    }

    pub fn baseline() -> Self {
        NluConfig {
            variant: NluVariant::Baseline,
            ..NluConfig::full()
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.transformer_dim == 0
            || self.embed_dim == 0
            || self.num_layers == 0
            || self.epochs == 0
            || self.batch_size == 0
        {
            return Err(crate::Error::Validation(
                "nlu config: dimensions, layers, epochs, and batch size must be positive".into(),
            ));
        }
        if self.transformer_dim % self.num_heads != 0 {
            return Err(crate::Error::Validation(format!(
                "transformer dim {} not divisible by {} heads",
                self.transformer_dim, self.num_heads
            )));
        }
        if self.ngram_range.0 == 0 || self.ngram_range.0 > self.ngram_range.1 {
            return Err(crate::Error::Validation(format!(
                "bad n-gram range {:?}",
                self.ngram_range
            )));
        }
        if !(0.0..=1.0).contains(&self.fallback_threshold) {
            return Err(crate::Error::Validation(format!(
                "fallback threshold {} outside [0, 1]",
                self.fallback_threshold
            )));
        }
        Ok(())
    }
}

/// CRF entity head over per-token encoder states.
#[derive(Debug, Clone)]
pub struct EntityHead {
    pub emit: Linear,
    pub crf: Crf,
}

#[derive(Debug, Clone)]
pub struct NluModel {
    pub config: NluConfig,
    pub intents: Vec<String>,
    /// Dense provider recorded at training time (e.g. "hash").
    pub dense_name: String,
    pub dense_dim: usize,
    /// Present for the full variant only.
    pub vocab: Option<SparseVocab>,
    pub sparse_proj: Option<SparseLinear>,
    pub dense_proj: Linear,
    pub encoder: TransformerStack,
    pub embed: Linear,
    /// One similarity-space row per intent.
    pub intent_embed: Param,
    pub entity: Option<EntityHead>,
}

/// Encoder output for one utterance.
pub struct Encoded {
    pub sentence: Array1<f64>,
    /// CRF emission scores per token, `[T, 3]`; absent for the baseline.
    pub emissions: Option<Array2<f64>>,
    pub num_tokens: usize,
}

pub struct EncodeCache {
    sparse_cache: Option<SparseLinearCache>,
    dense_cache: LinearCache,
    stack_cache: TransformerStackCache,
    embed_cache: LinearCache,
    emit_cache: Option<LinearCache>,
    seq_len: usize,
    num_tokens: usize,
}

impl NluModel {
    pub fn new<R: Rng>(
        config: NluConfig,
        intents: Vec<String>,
        vocab: Option<SparseVocab>,
        dense_name: String,
        dense_dim: usize,
        rng: &mut R,
    ) -> Self {
        let d = config.transformer_dim;
        let (vocab, sparse_proj, entity) = match config.variant {
            NluVariant::Full => {
                let v = vocab.expect("full variant requires a sparse vocab");
                let proj = SparseLinear::new(v.size(), d, rng);
                let entity = EntityHead {
                    emit: Linear::new(d, ENTITY_TAGS.len(), rng),
                    crf: Crf::new(ENTITY_TAGS.len()),
                };
                (Some(v), Some(proj), Some(entity))
            }
            NluVariant::Baseline => (None, None, None),
        };
        NluModel {
            dense_proj: Linear::new(dense_dim, d, rng),
            encoder: TransformerStack::new(
                config.num_layers,
                d,
                config.num_heads,
                config.ff_dim,
                false,
                rng,
            ),
            embed: Linear::new(d, config.embed_dim, rng),
            intent_embed: Param::xavier(intents.len(), config.embed_dim, rng),
            config,
            intents,
            dense_name,
            dense_dim,
            vocab,
            sparse_proj,
            entity,
        }
    }

    /// Tokenize and featurize one utterance with this model's vocab.
    pub fn featurize(
        &self,
        text: &str,
        provider: &DenseProvider,
    ) -> (Vec<String>, Option<SparseFeatures>, DenseFeatures) {
        let tokens = tokenize(text);
        let sparse = self
            .vocab
            .as_ref()
            .map(|v| sparse_featurize(&tokens, v));
        let dense = dense_lookup(provider, &tokens, text);
        (tokens, sparse, dense)
    }

    /// Forward pass. For the full variant the sequence is one row per
    /// token plus a trailing sentence (CLS) row; the baseline encodes the
    /// sentence row alone.
    pub fn encode(
        &self,
        sparse: Option<&SparseFeatures>,
        dense: &DenseFeatures,
    ) -> (Encoded, EncodeCache) {
        let num_tokens = match self.config.variant {
            NluVariant::Full => dense.token_vectors.len(),
            NluVariant::Baseline => 0,
        };
        let seq_len = num_tokens + 1;

        let mut dense_in = Array2::zeros((seq_len, self.dense_dim));
        for t in 0..num_tokens {
            for (j, &x) in dense.token_vectors[t].iter().enumerate() {
                dense_in[[t, j]] = f64::from(x);
            }
        }
        for (j, &x) in dense.sentence_vector.iter().enumerate() {
            dense_in[[num_tokens, j]] = f64::from(x);
        }
        let (dense_out, dense_cache) = self.dense_proj.forward(&dense_in);

        let (x, sparse_cache) = match (&self.sparse_proj, sparse) {
            (Some(proj), Some(feats)) => {
                let mut rows: Vec<Vec<usize>> = feats.token_indices.clone();
                rows.truncate(num_tokens);
                rows.push(feats.cls_indices.clone());
                let (sparse_out, cache) = proj.forward(&rows);
                (dense_out + sparse_out, Some(cache))
            }
            _ => (dense_out, None),
        };

        let (h, stack_cache) = self.encoder.forward(&x);
        let (embedded, embed_cache) = self.embed.forward(&h);
        let sentence = embedded.row(seq_len - 1).to_owned();

        let (emissions, emit_cache) = match &self.entity {
            Some(head) if num_tokens > 0 => {
                let (em_full, cache) = head.emit.forward(&h);
                let em = em_full.slice_axis(Axis(0), (0..num_tokens).into()).to_owned();
                (Some(em), Some(cache))
            }
            Some(head) => {
                let (_, cache) = head.emit.forward(&h);
                (Some(Array2::zeros((0, ENTITY_TAGS.len()))), Some(cache))
            }
            None => (None, None),
        };

        (
            Encoded {
                sentence,
                emissions,
                num_tokens,
            },
            EncodeCache {
                sparse_cache,
                dense_cache,
                stack_cache,
                embed_cache,
                emit_cache,
                seq_len,
                num_tokens,
            },
        )
    }

    /// Backpropagate loss gradients on the sentence embedding and (for
    /// the full variant) the CRF emissions.
    pub fn backward(
        &mut self,
        cache: &EncodeCache,
        grad_sentence: &Array1<f64>,
        grad_emissions: Option<&Array2<f64>>,
    ) {
        let mut grad_embedded = Array2::zeros((cache.seq_len, self.config.embed_dim));
        grad_embedded
            .row_mut(cache.seq_len - 1)
            .assign(grad_sentence);
        let mut g_h = self.embed.backward(&cache.embed_cache, &grad_embedded);

        if let (Some(head), Some(emit_cache), Some(g_em)) =
            (&mut self.entity, &cache.emit_cache, grad_emissions)
        {
            let mut g_em_full = Array2::zeros((cache.seq_len, ENTITY_TAGS.len()));
            for t in 0..cache.num_tokens {
                g_em_full.row_mut(t).assign(&g_em.row(t));
            }
            g_h += &head.emit.backward(emit_cache, &g_em_full);
        }

        let g_x = self.encoder.backward(&cache.stack_cache, &g_h);
        self.dense_proj.backward(&cache.dense_cache, &g_x);
        if let (Some(proj), Some(sparse_cache)) = (&mut self.sparse_proj, &cache.sparse_cache) {
            proj.backward(sparse_cache, &g_x);
        }
    }

    /// All trainable parameters with stable serialization names.
    pub fn named_params_mut(&mut self) -> Vec<(String, &mut Param)> {
        let mut out: Vec<(String, &mut Param)> = Vec::new();
        if let Some(proj) = &mut self.sparse_proj {
            out.push(("sparse_proj.w".into(), &mut proj.w));
            out.push(("sparse_proj.b".into(), &mut proj.b));
        }
        out.push(("dense_proj.w".into(), &mut self.dense_proj.w));
        out.push(("dense_proj.b".into(), &mut self.dense_proj.b));
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
        out.push(("intent_embed".into(), &mut self.intent_embed));
        if let Some(head) = &mut self.entity {
            out.push(("entity.emit.w".into(), &mut head.emit.w));
            out.push(("entity.emit.b".into(), &mut head.emit.b));
            out.push(("entity.crf.transitions".into(), &mut head.crf.transitions));
        }
        out
    }
}
