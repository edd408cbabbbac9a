use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{corrupt, word_error_rate, NoiseChannelConfig};
use crate::error::{Error, Result};

const TOLERANCE: f64 = 0.02;
const MAX_STEPS: usize = 50;

/// Fit channel rates so the measured corpus-level WER hits `target_wer`
/// within +/-0.02.
///
/// The three rates are scaled proportionally from the base config's
/// ratios (default 0.6/0.25/0.15 of the error mass when the base rates
/// are all zero) and the total mass is bisected against a seeded trial
/// corruption of the whole corpus.
pub fn calibrate(
    target_wer: f64,
    corpus: &[Vec<String>],
    base_config: &NoiseChannelConfig,
) -> Result<NoiseChannelConfig> {
    if !(0.0..1.5).contains(&target_wer) || target_wer <= 0.0 {
        return Err(Error::Validation(format!(
            "target_wer {target_wer} outside (0, 1.5)"
        )));
    }
    let total_words: usize = corpus.iter().map(Vec::len).sum();
    if total_words < 1000 {
        return Err(Error::Validation(format!(
            "calibration corpus too small: {total_words} words (need >= 1000)"
        )));
    }

    let base_mass = base_config.p_sub + base_config.p_del + base_config.p_ins;
    let (r_sub, r_del, r_ins) = if base_mass > 0.0 {
        (
            base_config.p_sub / base_mass,
            base_config.p_del / base_mass,
            base_config.p_ins / base_mass,
        )
    } else {
        (0.6, 0.25, 0.15)
    };

    let mut lo = 0.0f64;
    let mut hi = 2.5f64;
    let mut last_measured = 0.0;
    for _ in 0..MAX_STEPS {
        let mass = 0.5 * (lo + hi);
        let candidate = config_at_mass(base_config, mass, r_sub, r_del, r_ins);
        last_measured = measure_wer(corpus, &candidate);
        if (last_measured - target_wer).abs() <= TOLERANCE {
            return Ok(candidate);
        }
        if last_measured < target_wer {
            lo = mass;
        } else {
            hi = mass;
        }
    }
    Err(Error::CalibrationFailed(format!(
        "no rate scale within +/-{TOLERANCE} of target {target_wer} after {MAX_STEPS} steps; last measured WER {last_measured:.4}"
    )))
}

/// Rates at a given total error mass, respecting p_sub + p_del <= 1 by
/// shifting the clipped excess onto insertions (high-WER targets are only
/// reachable through insertions).
fn config_at_mass(
    base: &NoiseChannelConfig,
    mass: f64,
    r_sub: f64,
    r_del: f64,
    r_ins: f64,
) -> NoiseChannelConfig {
    let mut p_sub = r_sub * mass;
    let mut p_del = r_del * mass;
    let mut p_ins = r_ins * mass;
    let sd = p_sub + p_del;
    if sd > 1.0 {
        let scale = 1.0 / sd;
        p_ins += sd - 1.0;
        p_sub *= scale;
        p_del *= scale;
    }
    p_ins = p_ins.min(0.99);
    NoiseChannelConfig {
        p_sub,
        p_del,
        p_ins,
        ..base.clone()
    }
}

/// Corpus-level WER of one seeded corruption trial: total edits over total
/// reference words, each utterance corrupted with an independent sub-seed.
pub fn measure_wer(corpus: &[Vec<String>], config: &NoiseChannelConfig) -> f64 {
    let mut edits = 0usize;
    let mut words = 0usize;
    for (idx, reference) in corpus.iter().enumerate() {
        if reference.is_empty() {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (idx as u64).wrapping_mul(0x9e37_79b9));
        let hyp = corrupt(reference, config, &mut rng);
        let r = word_error_rate(reference, &hyp).expect("non-empty reference");
        edits += r.edits();
        words += reference.len();
    }
    if words == 0 {
        0.0
    } else {
        edits as f64 / words as f64
    }
}
