use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::featurize::tokenize;

const CACHE_MAGIC: &[u8; 4] = b"EMB1";

/// Deterministic pseudo-random unit-norm embedding of a token. Stands in
/// for a pre-trained encoder when no cache entry exists; at d >= 64 the
/// vectors of distinct tokens are close to mutually orthogonal.
pub fn hash_embed(token: &str, dim: usize, seed: u64) -> Vec<f32> {
    assert!(dim >= 1, "hash_embed: dim must be >= 1");
    let mut state = fnv1a(token) ^ seed.wrapping_mul(0x2545_f491_4f6c_dd1d);
    let mut v = Vec::with_capacity(dim);
    // Box-Muller over a splitmix64 stream.
    let mut pending: Option<f64> = None;
    for _ in 0..dim {
        if let Some(z) = pending.take() {
            v.push(z as f32);
            continue;
        }
        let u1 = next_unit(&mut state).max(1e-12);
        let u2 = next_unit(&mut state);
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        v.push((r * theta.cos()) as f32);
        pending = Some(r * theta.sin());
    }
    let norm: f32 = v.iter().map(|x| x * x).sum::<f32>().sqrt();
    if norm > 0.0 {
        for x in &mut v {
            *x /= norm;
        }
    }
    v
}

fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn next_unit(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 / (1u64 << 53) as f64
}

/// File-backed store of token and sentence vectors, populated offline
/// from any pre-trained encoder. Sentence entries are keyed
/// `"s:" + normalized text` where normalization is tokenize + join.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingCache {
    pub dim: usize,
    pub entries: BTreeMap<String, Vec<f32>>,
}

impl EmbeddingCache {
    pub fn new(dim: usize) -> Self {
        EmbeddingCache {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, key: &str, vector: Vec<f32>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "cache entry {key:?} has dim {}, cache dim {}",
                vector.len(),
                self.dim
            )));
        }
        self.entries.insert(key.to_string(), vector);
        Ok(())
    }

    pub fn sentence_key(text: &str) -> String {
        format!("s:{}", tokenize(text).join(" "))
    }

    /// Binary layout: magic "EMB1", u32-LE dimension, u32-LE entry count,
    /// then (u16-LE key length, UTF-8 key, dim little-endian f32) records.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(self.entries.len() as u32).to_le_bytes())?;
        for (key, vec) in &self.entries {
            let kb = key.as_bytes();
            if kb.len() > u16::MAX as usize {
                return Err(Error::Format(format!("cache key too long: {} bytes", kb.len())));
            }
            w.write_all(&(kb.len() as u16).to_le_bytes())?;
            w.write_all(kb)?;
            for x in vec {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Format(format!(
                "bad embedding cache magic {magic:?}, expected {CACHE_MAGIC:?}"
            )));
        }
        let dim = read_u32(&mut r)? as usize;
        let count = read_u32(&mut r)? as usize;
        let mut entries = BTreeMap::new();
        for _ in 0..count {
            let mut len_buf = [0u8; 2];
            r.read_exact(&mut len_buf)?;
            let klen = u16::from_le_bytes(len_buf) as usize;
            let mut kbuf = vec![0u8; klen];
            r.read_exact(&mut kbuf)?;
            let key = String::from_utf8(kbuf)
                .map_err(|e| Error::Format(format!("non-UTF-8 cache key: {e}")))?;
            let mut vec = Vec::with_capacity(dim);
            let mut fbuf = [0u8; 4];
            for _ in 0..dim {
                r.read_exact(&mut fbuf)?;
                vec.push(f32::from_le_bytes(fbuf));
            }
            entries.insert(key, vec);
        }
        Ok(EmbeddingCache { dim, entries })
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

/// Source of dense token/sentence vectors. Cache providers fall back to
/// hash embeddings on misses so ASR-corrupted out-of-vocabulary words
/// still get a representation.
#[derive(Debug, Clone)]
pub enum DenseProvider {
    /// Pure hashing provider; the sentence vector is the normalized mean
    /// of the token vectors (zero for empty input).
    Hash { dim: usize, seed: u64 },
    /// File-backed cache (e.g. `cache:bert-base`, `cache:mathbert-custom`)
    /// with hash fallback for missing keys.
    Cache {
        name: String,
        cache: EmbeddingCache,
        fallback_seed: u64,
    },
}

impl DenseProvider {
    pub fn name(&self) -> String {
        match self {
            DenseProvider::Hash { .. } => "hash".to_string(),
            DenseProvider::Cache { name, .. } => format!("cache:{name}"),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DenseProvider::Hash { dim, .. } => *dim,
            DenseProvider::Cache { cache, .. } => cache.dim,
        }
    }
}

/// Dense vectors for one utterance plus bookkeeping about cache misses
/// and degenerate input.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseFeatures {
    pub token_vectors: Vec<Vec<f32>>,
    pub sentence_vector: Vec<f32>,
    pub dim: usize,
    pub cache_misses: usize,
    /// True when the input had no tokens and the sentence vector is zero.
    pub empty_input: bool,
}

pub fn dense_lookup(provider: &DenseProvider, tokens: &[String], text: &str) -> DenseFeatures {
    let dim = provider.dim();
    let mut misses = 0usize;
    let token_vectors: Vec<Vec<f32>> = tokens
        .iter()
        .map(|t| match provider {
            DenseProvider::Hash { dim, seed } => hash_embed(t, *dim, *seed),
            DenseProvider::Cache {
                cache,
                fallback_seed,
                ..
            } => cache.entries.get(t).cloned().unwrap_or_else(|| {
                misses += 1;
                hash_embed(t, cache.dim, *fallback_seed)
            }),
        })
        .collect();

    let sentence_vector = if tokens.is_empty() {
        vec![0.0; dim]
    } else {
        match provider {
            DenseProvider::Hash { dim, .. } => mean_normalized(&token_vectors, *dim),
            DenseProvider::Cache {
                cache,
                fallback_seed,
                ..
            } => {
                let key = EmbeddingCache::sentence_key(text);
                cache.entries.get(&key).cloned().unwrap_or_else(|| {
                    misses += 1;
                    let mut v = mean_normalized(&token_vectors, cache.dim);
                    if v.iter().all(|x| *x == 0.0) {
                        v = hash_embed(&key, cache.dim, *fallback_seed);
                    }
                    v
                })
            }
        }
    };

    DenseFeatures {
        dim,
        cache_misses: misses,
        empty_input: tokens.is_empty(),
        token_vectors,
        sentence_vector,
    }
}

fn mean_normalized(vectors: &[Vec<f32>], dim: usize) -> Vec<f32> {
    let mut mean = vec![0.0f32; dim];
    for v in vectors {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    let n = vectors.len().max(1) as f32;
    for m in &mut mean {
        *m /= n;
    }
    let norm: f32 = mean.iter().map(|x| x * x).sum::<f32>().sqrt();
    if norm > 1e-12 {
        for m in &mut mean {
            *m /= norm;
        }
    }
    mean
}
