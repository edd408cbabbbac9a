use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mathsds_core::asr_sim::{corrupt, word_error_rate, NoiseChannelConfig};
use mathsds_core::corpus::{generate_dataset, profile_by_name};
use mathsds_core::featurize::{
    build_sparse_vocab, hash_embed, sparse_featurize, tokenize,
};
use mathsds_core::nlu::Crf;

fn bench_wer(c: &mut Criterion) {
    let reference: Vec<String> = "we just counted nineteen flowers in the meadow today"
        .split_whitespace()
        .map(String::from)
        .collect();
    let hypothesis: Vec<String> = "he doesn't canton nineteen flowers in that meadow"
        .split_whitespace()
        .map(String::from)
        .collect();
    c.bench_function("word_error_rate/9_tokens", |b| {
        b.iter(|| word_error_rate(black_box(&reference), black_box(&hypothesis)).unwrap())
    });
}

fn bench_corrupt(c: &mut Criterion) {
    let tokens: Vec<String> = "let's count to twenty seven together one more time"
        .split_whitespace()
        .map(String::from)
        .collect();
    let config = NoiseChannelConfig {
        p_sub: 0.18,
        p_del: 0.08,
        p_ins: 0.05,
        ..NoiseChannelConfig::silent(7)
    }
    .with_pool_from_tokens(tokens.iter().map(String::as_str));
    c.bench_function("corrupt/9_tokens", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        b.iter(|| corrupt(black_box(&tokens), &config, &mut rng))
    });
}

fn bench_featurize(c: &mut Criterion) {
    let profile = profile_by_name("planting-poc").unwrap();
    let dataset = generate_dataset(&profile).unwrap();
    let tokenized: Vec<Vec<String>> = dataset.iter().map(|u| tokenize(&u.text)).collect();
    let vocab = build_sparse_vocab(&tokenized, (3, 5)).unwrap();
    let sample = &tokenized[0];
    c.bench_function("sparse_featurize/one_utterance", |b| {
        b.iter(|| sparse_featurize(black_box(sample), &vocab))
    });
    c.bench_function("hash_embed/64", |b| {
        b.iter(|| hash_embed(black_box("nineteen"), 64, 0))
    });
}

fn bench_viterbi(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let crf = Crf::new(3);
    use rand::Rng;
    let emissions =
        ndarray::Array2::from_shape_fn((12, 3), |_| rng.gen_range(-2.0..2.0));
    c.bench_function("crf_viterbi/12_tokens", |b| {
        b.iter(|| crf.viterbi(black_box(&emissions)))
    });
}

criterion_group!(benches, bench_wer, bench_corrupt, bench_featurize, bench_viterbi);
criterion_main!(benches);
