use rand::distributions::WeightedIndex;
use rand::prelude::*;

use super::NoiseChannelConfig;

/// Pass a token sequence through the noise channel.
///
/// Multi-word confusion keys are matched greedily (bigram before unigram)
/// so pairs like "twenty two" -> "tell me too" survive as phrase-level
/// confusions. A substitution never reproduces the original word.
pub fn corrupt<R: Rng>(tokens: &[String], config: &NoiseChannelConfig, rng: &mut R) -> Vec<String> {
    let pool: Vec<&str> = config.unigram_pool.iter().map(|(w, _)| w.as_str()).collect();
    let weights: Vec<u32> = config.unigram_pool.iter().map(|(_, c)| *c).collect();
    let pool_dist = if pool.is_empty() {
        None
    } else {
        WeightedIndex::new(&weights).ok()
    };

    let mut out: Vec<String> = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        // Longest confusion-key match at this position.
        let mut span = 1;
        let mut key: Option<&str> = None;
        if i + 1 < tokens.len() {
            let bigram = format!("{} {}", tokens[i], tokens[i + 1]);
            if let Some((k, _)) = config.confusions.get_key_value(bigram.as_str()) {
                key = Some(k.as_str());
                span = 2;
            }
        }
        if key.is_none() {
            if let Some((k, _)) = config.confusions.get_key_value(tokens[i].as_str()) {
                key = Some(k.as_str());
            }
        }

        let u: f64 = rng.gen();
        if u < config.p_sub {
            let replacement = match key {
                Some(k) => {
                    let alts = &config.confusions[k];
                    alts[rng.gen_range(0..alts.len())].clone()
                }
                None => draw_other(&pool, pool_dist.as_ref(), &tokens[i], rng),
            };
            if !replacement.is_empty() {
                out.extend(replacement.split_whitespace().map(str::to_string));
            }
        } else if u < config.p_sub + config.p_del {
            // word dropped
        } else {
            out.extend(tokens[i..i + span].iter().cloned());
        }
        // Insertion after this (possibly multi-word) position.
        if rng.gen::<f64>() < config.p_ins {
            if let Some(dist) = pool_dist.as_ref() {
                out.push(pool[dist.sample(rng)].to_string());
            }
        }
        i += span;
    }
    out
}

fn draw_other<R: Rng>(
    pool: &[&str],
    dist: Option<&WeightedIndex<u32>>,
    original: &str,
    rng: &mut R,
) -> String {
    let Some(dist) = dist else {
        return String::new();
    };
    for _ in 0..32 {
        let w = pool[dist.sample(rng)];
        if w != original {
            return w.to_string();
        }
    }
    // Pool is (nearly) a single distinct word equal to the original;
    // dropping the word is the only way to honor "never the same word".
    String::new()
}
