//! NLU model persistence on top of the shared model container format.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurize::SparseVocab;
use crate::nn::ModelContainer;

use super::model::{NluConfig, NluModel};

#[derive(Serialize, Deserialize)]
struct Metadata {
    kind: String,
    config: NluConfig,
    intents: Vec<String>,
    dense_name: String,
    dense_dim: usize,
    vocab: Option<SparseVocab>,
}

pub fn save_nlu(model: &NluModel, path: &Path) -> Result<()> {
    let meta = Metadata {
        kind: "nlu".to_string(),
        config: model.config.clone(),
        intents: model.intents.clone(),
        dense_name: model.dense_name.clone(),
        dense_dim: model.dense_dim,
        vocab: model.vocab.clone(),
    };
    let mut container = ModelContainer::new(serde_json::to_value(&meta)?);
    let mut copy = model.clone();
    for (name, param) in copy.named_params_mut() {
        container.add_tensor(&name, &param.value);
    }
    container.save(path)
}

pub fn load_nlu(path: &Path) -> Result<NluModel> {
    let mut container = ModelContainer::load(path)?;
    let meta: Metadata = serde_json::from_value(container.metadata.clone())?;
    if meta.kind != "nlu" {
        return Err(Error::Format(format!(
            "expected an nlu model, found kind {:?}",
            meta.kind
        )));
    }
    // weights are overwritten below; the init rng only shapes the skeleton
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut model = NluModel::new(
        meta.config,
        meta.intents,
        meta.vocab,
        meta.dense_name,
        meta.dense_dim,
        &mut rng,
    );
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
    if !container.tensors.is_empty() {
        let extra: Vec<&String> = container.tensors.keys().collect();
        return Err(Error::Format(format!(
            "container has unexpected tensors: {extra:?}"
        )));
    }
    Ok(model)
}
