use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::corpus::grammar::{filler_pool, sample_utterance};
use crate::corpus::registry::intent_registry;
use crate::corpus::stats::compute_stats;
use crate::corpus::types::{
    is_math_related, Dataset, DatasetProfile, Source, Utterance, MATH_RELATED_INTENTS,
};
use crate::error::{Error, Result};
use crate::featurize::tokenize;

/// Relative tolerance on sample counts, averages, and vocabulary.
pub const STAT_TOLERANCE: f64 = 0.10;

/// Generate a synthetic corpus matching a profile's targets.
///
/// Utterances come from per-intent template grammars; a calibration pass
/// then pads the chit-chat utterances with filler words until corpus
/// length and vocabulary land on the targets. Output is a pure function
/// of (profile, seed).
pub fn generate_dataset(profile: &DatasetProfile) -> Result<Dataset> {
    profile.validate()?;
    let registry = intent_registry(profile.game, profile.target_num_intents)?;
    let counts = allocate_counts(profile, &registry)?;
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);

    let mut texts: Vec<(String, String, Vec<crate::corpus::types::EntitySpan>)> = Vec::new();
    for intent in &registry {
        for _ in 0..counts[intent] {
            let (text, entities) = sample_utterance(intent, profile.game, &mut rng);
            texts.push((intent.clone(), text, entities));
        }
    }

    calibrate_text(&mut texts, profile, &mut rng)?;

    // Shuffle into mixed-intent sessions before assigning ids.
    texts.shuffle(&mut rng);
    let mut dataset: Dataset = Vec::with_capacity(texts.len());
    let mut session = 0usize;
    let mut turn = 0u32;
    let mut session_len = rng.gen_range(8..=14);
    for (i, (intent, text, entities)) in texts.into_iter().enumerate() {
        if turn as usize >= session_len {
            session += 1;
            turn = 0;
            session_len = rng.gen_range(8..=14);
        }
        dataset.push(Utterance {
            id: format!("u{i:06}"),
            text,
            intent,
            entities,
            game: profile.game,
            source: Source::Synthetic,
            session: format!("{}-{session:04}", profile.name),
            turn_index: turn,
        });
        turn += 1;
    }

    for utt in &dataset {
        utt.validate(&registry)?;
    }
    check_targets(&dataset, profile)?;
    Ok(dataset)
}

/// Per-intent sample allocation: math-related intents split the
/// math-related target with fixed proportions, the chit-chat intent is
/// pinned at the per-intent maximum, and the rest follow a truncated
/// geometric series. Bounds are repaired afterwards.
fn allocate_counts(
    profile: &DatasetProfile,
    registry: &[String],
) -> Result<BTreeMap<String, usize>> {
    let lo = profile.min_samples_per_intent;
    let hi = profile.max_samples_per_intent;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();

    let math: Vec<&String> = registry.iter().filter(|i| is_math_related(i)).collect();
    if math.is_empty() {
        return Err(Error::UnsatisfiableProfile(format!(
            "registry has no math-related intent (looked for {MATH_RELATED_INTENTS:?})"
        )));
    }
    let weights: Vec<f64> = math
        .iter()
        .map(|i| match i.as_str() {
            "counting" => 0.60,
            "ask-number" => 0.10,
            _ => 0.30,
        })
        .collect();
    let wsum: f64 = weights.iter().sum();
    for (intent, w) in math.iter().zip(&weights) {
        let c = ((w / wsum) * profile.target_math_related_samples as f64).round() as usize;
        counts.insert((*intent).clone(), c.clamp(lo, hi));
    }
    repair_sum(
        &mut counts,
        &math.iter().map(|s| (*s).clone()).collect::<Vec<_>>(),
        profile.target_math_related_samples,
        lo,
        hi,
    )?;

    let others: Vec<String> = registry
        .iter()
        .filter(|i| !is_math_related(i))
        .cloned()
        .collect();
    let remaining = profile.target_num_samples - profile.target_math_related_samples;
    // Chit-chat carries the long-utterance mass; give it the max share.
    let oos_budget = hi.min(remaining.saturating_sub(lo * (others.len() - 1)));
    let rest = remaining - oos_budget;
    let non_oos: Vec<String> = others
        .iter()
        .filter(|i| i.as_str() != "out-of-scope")
        .cloned()
        .collect();
    let q = 0.75f64;
    let geo_weights: Vec<f64> = (0..non_oos.len()).map(|k| q.powi(k as i32)).collect();
    let gsum: f64 = geo_weights.iter().sum();
    counts.insert("out-of-scope".into(), oos_budget);
    for (intent, w) in non_oos.iter().zip(&geo_weights) {
        let c = ((w / gsum) * rest as f64).round() as usize;
        counts.insert(intent.clone(), c.clamp(lo, hi));
    }
    repair_sum(&mut counts, &non_oos, rest, lo, hi)?;

    debug_assert_eq!(
        counts.values().sum::<usize>(),
        profile.target_num_samples,
        "allocation must hit the sample target exactly"
    );
    Ok(counts)
}

/// Nudge counts of `adjustable` intents until they sum to `target`,
/// staying inside [lo, hi].
fn repair_sum(
    counts: &mut BTreeMap<String, usize>,
    adjustable: &[String],
    target: usize,
    lo: usize,
    hi: usize,
) -> Result<()> {
    let current: usize = adjustable.iter().map(|i| counts[i]).sum();
    let mut delta = target as isize - current as isize;
    let mut stuck = 0;
    while delta != 0 {
        let before = delta;
        for intent in adjustable {
            if delta == 0 {
                break;
            }
            let c = counts.get_mut(intent).expect("allocated");
            if delta > 0 && *c < hi {
                *c += 1;
                delta -= 1;
            } else if delta < 0 && *c > lo {
                *c -= 1;
                delta += 1;
            }
        }
        if delta == before {
            stuck += 1;
            if stuck > 1 {
                return Err(Error::UnsatisfiableProfile(format!(
                    "cannot reach {target} samples over {} intents within [{lo}, {hi}]",
                    adjustable.len()
                )));
            }
        }
    }
    Ok(())
}

/// Steer total word count and vocabulary onto the profile targets by
/// padding (or trimming) the chit-chat utterances, which never carry
/// entity spans.
fn calibrate_text(
    texts: &mut [(String, String, Vec<crate::corpus::types::EntitySpan>)],
    profile: &DatasetProfile,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let mut pool = filler_pool();
    pool.shuffle(rng);

    let oos: Vec<usize> = texts
        .iter()
        .enumerate()
        .filter(|(_, (intent, _, _))| intent == "out-of-scope")
        .map(|(i, _)| i)
        .collect();
    if oos.is_empty() {
        return Err(Error::UnsatisfiableProfile(
            "length calibration needs an out-of-scope intent in the registry".into(),
        ));
    }

    let n = texts.len();
    let target_total = (profile.target_avg_words_per_sample * n as f64).round() as isize;

    for _pass in 0..8 {
        let mut vocab: BTreeSet<String> = BTreeSet::new();
        let mut total = 0isize;
        for (_, text, _) in texts.iter() {
            let toks = tokenize(text);
            total += toks.len() as isize;
            vocab.extend(toks);
        }
        let word_deficit = target_total - total;
        let vocab_deficit = profile.target_vocab_size as isize - vocab.len() as isize;
        let words_ok = (word_deficit.unsigned_abs() as f64) <= 0.02 * target_total as f64;
        let vocab_ok =
            (vocab_deficit.unsigned_abs() as f64) <= 0.05 * profile.target_vocab_size as f64;
        if words_ok && vocab_ok {
            return Ok(());
        }

        if word_deficit > 0 || vocab_deficit > 0 {
            let mut unused: Vec<&String> = pool.iter().filter(|w| !vocab.contains(*w)).collect();
            let used_filler: Vec<&String> = pool.iter().filter(|w| vocab.contains(*w)).collect();
            if unused.is_empty() && vocab_deficit > 0 {
                return Err(Error::UnsatisfiableProfile(format!(
                    "vocab target {} exceeds what the grammars and filler pool can produce ({})",
                    profile.target_vocab_size,
                    vocab.len()
                )));
            }
            let mut to_add = word_deficit.max(vocab_deficit).max(0) as usize;
            let mut need_new = vocab_deficit.max(0) as usize;
            let mut cursor = 0usize;
            while to_add > 0 {
                let idx = oos[cursor % oos.len()];
                cursor += 1;
                let text = &mut texts[idx].1;
                if tokenize(text).len() >= profile.max_words_per_sample {
                    if cursor > oos.len() * profile.max_words_per_sample {
                        return Err(Error::UnsatisfiableProfile(format!(
                            "avg words target {} unreachable under max {} words per sample",
                            profile.target_avg_words_per_sample, profile.max_words_per_sample
                        )));
                    }
                    continue;
                }
                let word = if need_new > 0 && !unused.is_empty() {
                    need_new -= 1;
                    unused.remove(0).clone()
                } else if !used_filler.is_empty() {
                    used_filler[rng.gen_range(0..used_filler.len())].clone()
                } else {
                    pool[rng.gen_range(0..pool.len())].clone()
                };
                text.push(' ');
                text.push_str(&word);
                to_add -= 1;
            }
        } else if word_deficit < 0 {
            // Trim trailing filler from the longest chit-chat utterances.
            let mut to_remove = (-word_deficit) as usize;
            let mut by_len: Vec<usize> = oos.clone();
            by_len.sort_by_key(|&i| std::cmp::Reverse(tokenize(&texts[i].1).len()));
            'outer: loop {
                let mut removed_any = false;
                for &idx in &by_len {
                    if to_remove == 0 {
                        break 'outer;
                    }
                    let text = &mut texts[idx].1;
                    let toks = tokenize(text);
                    if toks.len() > profile.min_words_per_sample.max(2) {
                        if let Some(pos) = text.rfind(' ') {
                            text.truncate(pos);
                            to_remove -= 1;
                            removed_any = true;
                        }
                    }
                }
                if !removed_any {
                    break;
                }
            }
        }
    }
    Err(Error::UnsatisfiableProfile(
        "length/vocab calibration did not settle within its pass budget".into(),
    ))
}

/// Post-generation verification against the profile's declared
/// tolerances (exact on intent count).
fn check_targets(dataset: &Dataset, profile: &DatasetProfile) -> Result<()> {
    let stats = compute_stats(dataset)?;
    if stats.num_intents != profile.target_num_intents {
        return Err(Error::UnsatisfiableProfile(format!(
            "generated {} intents, profile requires exactly {}",
            stats.num_intents, profile.target_num_intents
        )));
    }
    let checks: [(&str, f64, f64); 4] = [
        (
            "num_samples",
            stats.num_samples as f64,
            profile.target_num_samples as f64,
        ),
        (
            "math_related_samples",
            stats.math_related_samples as f64,
            profile.target_math_related_samples as f64,
        ),
        (
            "avg_words_per_sample",
            stats.avg_words_per_sample,
            profile.target_avg_words_per_sample,
        ),
        (
            "vocab_size",
            stats.vocab_size as f64,
            profile.target_vocab_size as f64,
        ),
    ];
    for (name, got, want) in checks {
        if (got - want).abs() > STAT_TOLERANCE * want {
            return Err(Error::UnsatisfiableProfile(format!(
                "{name}: generated {got:.2}, target {want:.2} (tolerance {:.0}%)",
                STAT_TOLERANCE * 100.0
            )));
        }
    }
    if stats.min_samples_per_intent < profile.min_samples_per_intent
        || stats.max_samples_per_intent > profile.max_samples_per_intent
    {
        return Err(Error::UnsatisfiableProfile(format!(
            "per-intent counts [{}, {}] violate bounds [{}, {}]",
            stats.min_samples_per_intent,
            stats.max_samples_per_intent,
            profile.min_samples_per_intent,
            profile.max_samples_per_intent
        )));
    }
    if stats.max_words_per_sample > profile.max_words_per_sample
        || stats.min_words_per_sample < profile.min_words_per_sample
    {
        return Err(Error::UnsatisfiableProfile(format!(
            "words per sample [{}, {}] violate bounds [{}, {}]",
            stats.min_words_per_sample,
            stats.max_words_per_sample,
            profile.min_words_per_sample,
            profile.max_words_per_sample
        )));
    }
    Ok(())
}
