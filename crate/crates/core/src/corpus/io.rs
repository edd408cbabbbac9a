use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::registry::action_registry;
use crate::corpus::types::{Dataset, Game, Utterance};
use crate::error::{Error, Result};

/// Sidecar header listing the registries a dataset was annotated against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub game: Game,
    pub intents: Vec<String>,
    pub actions: Vec<String>,
}

/// `d.jsonl` -> `d.header.json`.
pub fn header_path(dataset_path: &Path) -> PathBuf {
    let stem = dataset_path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "dataset".into());
    dataset_path.with_file_name(format!("{stem}.header.json"))
}

/// Write one JSON record per line plus the registry sidecar.
pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    let first = dataset
        .first()
        .ok_or_else(|| Error::Validation("save_dataset: empty dataset".into()))?;
    let game = first.game;
    let intents: BTreeSet<&str> = dataset.iter().map(|u| u.intent.as_str()).collect();
    let header = DatasetHeader {
        game,
        intents: intents.into_iter().map(str::to_string).collect(),
        actions: action_registry(game),
    };

    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for utt in dataset {
        serde_json::to_writer(&mut w, utt)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;

    let header_file = std::fs::File::create(header_path(path))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(header_file), &header)?;
    Ok(())
}

/// Load and validate a JSONL dataset. Malformed records and intents
/// outside the header registry are reported with their line number.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let header: Option<DatasetHeader> = match std::fs::File::open(header_path(path)) {
        Ok(f) => Some(serde_json::from_reader(std::io::BufReader::new(f))?),
        Err(_) => None,
    };
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut dataset = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let utt: Utterance = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        let registry: Vec<String> = match &header {
            Some(h) => h.intents.clone(),
            None => vec![utt.intent.clone()],
        };
        utt.validate(&registry).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        dataset.push(utt);
    }
    Ok(dataset)
}

pub fn load_header(path: &Path) -> Result<DatasetHeader> {
    let f = std::fs::File::open(header_path(path))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
}
