//! Tokenization, sparse character-n-gram features, and dense embedding
//! providers (hashing fallback or a file-backed cache standing in for
//! pre-trained BERT/ConveRT/MathBERT representations).

mod dense;
mod sparse;
mod tokenize;

pub use dense::{
    dense_lookup, hash_embed, DenseFeatures, DenseProvider, EmbeddingCache,
};
pub use sparse::{
    build_sparse_vocab, char_ngrams, sparse_featurize, SparseFeatures, SparseVocab,
};
pub use tokenize::{tokenize, tokenize_with_offsets};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_embed_deterministic_and_unit_norm() {
        let a = hash_embed("six", 64, 7);
        let b = hash_embed("six", 64, 7);
        assert_eq!(a, b);
        let norm: f32 = a.iter().map(|x| x * x).sum::<f32>().sqrt();
        assert!((norm - 1.0).abs() < 1e-6, "norm = {norm}");
        assert_ne!(a, hash_embed("six", 64, 8));
        assert_ne!(a, hash_embed("seven", 64, 7));
    }

    #[test]
    fn cache_roundtrip_and_miss_fallback() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("test.emb");
        let mut cache = EmbeddingCache::new(4);
        cache.insert("six", vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        cache
            .insert(&EmbeddingCache::sentence_key("six flowers"), vec![0.0, 1.0, 0.0, 0.0])
            .unwrap();
        cache.save(&path).unwrap();
        let loaded = EmbeddingCache::load(&path).unwrap();
        assert_eq!(loaded, cache);

        let provider = DenseProvider::Cache {
            name: "test".into(),
            cache: loaded,
            fallback_seed: 3,
        };
        let toks = tokenize("six flowers");
        let feats = dense_lookup(&provider, &toks, "six flowers");
        assert_eq!(feats.token_vectors[0], vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(feats.sentence_vector, vec![0.0, 1.0, 0.0, 0.0]);
        // "flowers" missing from the cache
        assert_eq!(feats.cache_misses, 1);
        assert_eq!(feats.token_vectors[1], hash_embed("flowers", 4, 3));
    }

    #[test]
    fn empty_sentence_is_zero_and_flagged() {
        let provider = DenseProvider::Hash { dim: 8, seed: 1 };
        let feats = dense_lookup(&provider, &[], "");
        assert!(feats.empty_input);
        assert!(feats.sentence_vector.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn lookup_is_order_independent() {
        let provider = DenseProvider::Hash { dim: 16, seed: 9 };
        let a = dense_lookup(&provider, &tokenize("count to ten"), "count to ten");
        let b = dense_lookup(&provider, &tokenize("ten to count"), "ten to count");
        assert_eq!(a.token_vectors[0], b.token_vectors[2]);
        assert_eq!(a.token_vectors[1], b.token_vectors[1]);
    }
}
