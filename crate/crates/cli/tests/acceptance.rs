//! Release gate: every core quality claim of the framework checked in one
//! place, one pass/fail line per criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines as they
//! complete; a single assertion at the end fails the gate if any criterion
//! failed.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mathsds_core::asr_sim::{calibrate, measure_wer, word_error_rate, NoiseChannelConfig};
use mathsds_core::corpus::{
    generate_dataset, generate_episodes, intent_registry, profile_by_name, ScenarioGraph,
};
use mathsds_core::dm::{train_dm, DmConfig};
use mathsds_core::eval::{run_condition, PipelineCondition};
use mathsds_core::featurize::{tokenize, DenseProvider};
use mathsds_core::nlu::{similarity_loss, split_dataset, train_nlu, Crf, NluConfig};

struct Gate {
    results: Vec<(bool, String)>,
}

impl Gate {
    fn new() -> Self {
        Gate { results: Vec::new() }
    }

    fn check(&mut self, number: usize, name: &str, ok: bool, detail: String) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("{verdict}  criterion {number:2}: {name} — {detail}");
        self.results.push((ok, format!("{number}: {name}")));
    }

    fn finish(self) {
        let failed: Vec<&str> = self
            .results
            .iter()
            .filter(|(ok, _)| !ok)
            .map(|(_, name)| name.as_str())
            .collect();
        assert!(
            failed.is_empty(),
            "{} of {} acceptance criteria failed: {failed:?}",
            failed.len(),
            self.results.len()
        );
    }
}

/// Everything the per-corpus criteria need, computed once per game.
struct CorpusRun {
    name: String,
    gen_secs: f64,
    num_intents: usize,
    target_num_intents: usize,
    samples_ok: bool,
    avg_words_ok: bool,
    math_ok: bool,
    nlu_train_secs: f64,
    full_f1: f64,
    baseline_f1: f64,
    calibrate_secs: f64,
    measured_wer: f64,
    noisy_f1: f64,
    clean_dm_acc: f64,
    noisy_dm_acc: f64,
}

fn within(actual: f64, target: f64, rel: f64) -> bool {
    (actual - target).abs() <= rel * target
}

fn run_corpus(profile_name: &str) -> CorpusRun {
    let profile = profile_by_name(profile_name).unwrap();
    let t0 = Instant::now();
    let dataset = generate_dataset(&profile).unwrap();
    let gen_secs = t0.elapsed().as_secs_f64();
    let stats = mathsds_core::corpus::compute_stats(&dataset).unwrap();

    let (train, heldout) = split_dataset(&dataset, 0.2, 7);
    let intents = intent_registry(profile.game, profile.target_num_intents).unwrap();
    let provider = DenseProvider::Hash { dim: 64, seed: 0 };

    let full_cfg = NluConfig {
        epochs: 4,
        ..NluConfig::full()
    };
    let t1 = Instant::now();
    let (full, _) = train_nlu(&train, &intents, &full_cfg, &provider).unwrap();
    let nlu_train_secs = t1.elapsed().as_secs_f64();

    let base_cfg = NluConfig {
        epochs: 4,
        ..NluConfig::baseline()
    };
    let (baseline, _) = train_nlu(&train, &intents, &base_cfg, &provider).unwrap();

    let t2 = Instant::now();
    let corpus_tokens: Vec<Vec<String>> = dataset.iter().map(|u| tokenize(&u.text)).collect();
    let base_noise = NoiseChannelConfig::silent(11)
        .with_pool_from_tokens(corpus_tokens.iter().flatten().map(String::as_str));
    let noise = calibrate(0.30, &corpus_tokens, &base_noise).unwrap();
    let measured_wer = measure_wer(&corpus_tokens, &noise);
    let calibrate_secs = t2.elapsed().as_secs_f64();

    let graph = ScenarioGraph::for_game(profile.game);
    let episodes_train = generate_episodes(&profile, 200, profile.seed ^ 0x5051).unwrap();
    let episodes_eval = generate_episodes(&profile, 60, profile.seed ^ 0x7777).unwrap();
    let dm_cfg = DmConfig {
        epochs: 10,
        ..DmConfig::default()
    };
    let (dm, _) = train_dm(&episodes_train, &graph, &dm_cfg).unwrap();

    let clean = run_condition(
        &heldout,
        Some(&episodes_eval),
        &full,
        &provider,
        Some(&dm),
        &PipelineCondition::clean(),
    )
    .unwrap();
    let noisy = run_condition(
        &heldout,
        Some(&episodes_eval),
        &full,
        &provider,
        Some(&dm),
        &PipelineCondition::noisy("wer-0.30", noise.clone()),
    )
    .unwrap();
    let baseline_clean = run_condition(
        &heldout,
        None,
        &baseline,
        &provider,
        None,
        &PipelineCondition::clean(),
    )
    .unwrap();

    CorpusRun {
        name: profile_name.to_string(),
        gen_secs,
        num_intents: stats.num_intents,
        target_num_intents: profile.target_num_intents,
        samples_ok: within(
            stats.num_samples as f64,
            profile.target_num_samples as f64,
            0.10,
        ),
        avg_words_ok: within(
            stats.avg_words_per_sample,
            profile.target_avg_words_per_sample,
            0.10,
        ),
        math_ok: within(
            stats.math_related_samples as f64,
            profile.target_math_related_samples as f64,
            0.10,
        ),
        nlu_train_secs,
        full_f1: clean.intent_micro_f1,
        baseline_f1: baseline_clean.intent_micro_f1,
        calibrate_secs,
        measured_wer,
        noisy_f1: noisy.intent_micro_f1,
        clean_dm_acc: clean.dm.as_ref().unwrap().action_accuracy,
        noisy_dm_acc: noisy.dm.as_ref().unwrap().action_accuracy,
    }
}

/// Exhaustive alignment oracle: walk every monotone alignment path and
/// keep minimum edits, then maximum substitutions. Lengths stay <= 8 so
/// the full walk is affordable.
fn oracle_align(reference: &[String], hypothesis: &[String]) -> (usize, usize, usize, usize) {
    fn go(
        r: &[String],
        h: &[String],
        i: usize,
        j: usize,
        s: usize,
        d: usize,
        ins: usize,
        best: &mut (usize, usize, usize, usize),
    ) {
        if i == r.len() && j == h.len() {
            let cost = s + d + ins;
            if cost < best.0 || (cost == best.0 && s > best.1) {
                *best = (cost, s, d, ins);
            }
            return;
        }
        if i < r.len() && j < h.len() {
            let c = usize::from(r[i] != h[j]);
            go(r, h, i + 1, j + 1, s + c, d, ins, best);
        }
        if i < r.len() {
            go(r, h, i + 1, j, s, d + 1, ins, best);
        }
        if j < h.len() {
            go(r, h, i, j + 1, s, d, ins + 1, best);
        }
    }
    let mut best = (usize::MAX, 0, 0, 0);
    go(reference, hypothesis, 0, 0, 0, 0, 0, &mut best);
    best
}

fn words(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn criterion_wer_oracle(gate: &mut Gate) {
    let vocab = [
        "we", "just", "counted", "nineteen", "he", "my", "team", "flowers",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut mismatches = 0usize;
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(0..=8);
        let reference: Vec<String> = (0..n)
            .map(|_| vocab[rng.gen_range(0..vocab.len())].to_string())
            .collect();
        let hypothesis: Vec<String> = (0..m)
            .map(|_| vocab[rng.gen_range(0..vocab.len())].to_string())
            .collect();
        let got = word_error_rate(&reference, &hypothesis).unwrap();
        let (cost, s, d, i) = oracle_align(&reference, &hypothesis);
        if got.edits() != cost
            || got.substitutions != s
            || got.deletions != d
            || got.insertions != i
        {
            mismatches += 1;
        }
    }
    let reference = words(&["we", "just", "counted", "nineteen"]);
    let hypothesis = words(&["he", "doesn't", "canton", "my", "team"]);
    let pinned = word_error_rate(&reference, &hypothesis).unwrap();
    let pinned_ok = (pinned.wer - 1.25).abs() < 1e-12;
    gate.check(
        4,
        "wer oracle equivalence",
        mismatches == 0 && pinned_ok,
        format!(
            "{mismatches}/100 mismatches vs exhaustive oracle; pinned pair wer {:.2}",
            pinned.wer
        ),
    );
}

fn criterion_crf_enumeration(gate: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut bad = 0usize;
    for _ in 0..200 {
        let t = rng.gen_range(1..=4);
        let l = rng.gen_range(1..=4);
        let mut crf = Crf::new(l);
        crf.transitions.value = Array2::from_shape_fn((l, l), |_| rng.gen_range(-2.0..2.0));
        let emissions = Array2::from_shape_fn((t, l), |_| rng.gen_range(-2.0..2.0));

        // enumerate all l^t label paths
        let mut paths: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..t {
            paths = paths
                .into_iter()
                .flat_map(|p| {
                    (0..l).map(move |y| {
                        let mut q = p.clone();
                        q.push(y);
                        q
                    })
                })
                .collect();
        }
        let scores: Vec<f64> = paths.iter().map(|p| crf.path_score(&emissions, p)).collect();
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let brute_log_z = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
        let best_idx = scores
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;

        if crf.viterbi(&emissions) != paths[best_idx]
            || (crf.log_partition(&emissions) - brute_log_z).abs() >= 1e-8
        {
            bad += 1;
        }
    }
    gate.check(
        8,
        "crf matches path enumeration",
        bad == 0,
        format!("{bad}/200 instances disagreed (viterbi exact, partition 1e-8)"),
    );
}

fn rel_close(analytic: f64, numeric: f64) -> bool {
    (analytic - numeric).abs() <= 1e-4 * numeric.abs().max(1.0)
}

fn criterion_gradient_checks(gate: &mut Gate) {
    const H: f64 = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut bad_coords = 0usize;

    // 25 similarity-loss instances, every coordinate checked
    for _ in 0..25 {
        let dim = 4;
        let k = 3;
        let input = Array1::from_shape_fn(dim, |_| rng.gen_range(-1.0..1.0));
        let cands = Array2::from_shape_fn((k, dim), |_| rng.gen_range(-1.0..1.0));
        let (_, g_in, g_cands) = similarity_loss(&input, &cands);
        for i in 0..dim {
            let mut up = input.clone();
            up[i] += H;
            let mut down = input.clone();
            down[i] -= H;
            let numeric =
                (similarity_loss(&up, &cands).0 - similarity_loss(&down, &cands).0) / (2.0 * H);
            if !rel_close(g_in[i], numeric) {
                bad_coords += 1;
            }
        }
        for r in 0..k {
            for c in 0..dim {
                let mut up = cands.clone();
                up[[r, c]] += H;
                let mut down = cands.clone();
                down[[r, c]] -= H;
                let numeric = (similarity_loss(&input, &up).0
                    - similarity_loss(&input, &down).0)
                    / (2.0 * H);
                if !rel_close(g_cands[[r, c]], numeric) {
                    bad_coords += 1;
                }
            }
        }
    }

    // 25 CRF negative-log-likelihood instances
    for _ in 0..25 {
        let t = rng.gen_range(2..=4);
        let l = 3;
        let mut crf = Crf::new(l);
        crf.transitions.value = Array2::from_shape_fn((l, l), |_| rng.gen_range(-1.0..1.0));
        let emissions = Array2::from_shape_fn((t, l), |_| rng.gen_range(-1.0..1.0));
        let labels: Vec<usize> = (0..t).map(|_| rng.gen_range(0..l)).collect();

        let mut working = crf.clone();
        let (_, g_em) = working.nll_backward(&emissions, &labels);
        for r in 0..t {
            for c in 0..l {
                let mut up = emissions.clone();
                up[[r, c]] += H;
                let mut down = emissions.clone();
                down[[r, c]] -= H;
                let f_up = crf.clone().nll_backward(&up, &labels).0;
                let f_down = crf.clone().nll_backward(&down, &labels).0;
                if !rel_close(g_em[[r, c]], (f_up - f_down) / (2.0 * H)) {
                    bad_coords += 1;
                }
            }
        }
        for r in 0..l {
            for c in 0..l {
                let mut up = crf.clone();
                up.transitions.value[[r, c]] += H;
                let mut down = crf.clone();
                down.transitions.value[[r, c]] -= H;
                let f_up = up.nll_backward(&emissions, &labels).0;
                let f_down = down.nll_backward(&emissions, &labels).0;
                if !rel_close(working.transitions.grad[[r, c]], (f_up - f_down) / (2.0 * H)) {
                    bad_coords += 1;
                }
            }
        }
    }

    gate.check(
        9,
        "analytic gradients match finite differences",
        bad_coords == 0,
        format!("{bad_coords} coordinates beyond 1e-4 relative error over 50 instances"),
    );
}

fn mathsds(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mathsds"))
        .args(args)
        .env("MATHSDS_DATA_DIR", dir)
        .output()
        .expect("failed to spawn mathsds")
}

fn run_pipeline(dir: &Path) {
    let d = |name: &str| dir.join(name).to_string_lossy().to_string();
    let steps: Vec<Vec<String>> = vec![
        vec![
            "gen-data".into(),
            "--profile".into(),
            "planting-poc".into(),
            "--out".into(),
            d(""),
            "--episodes".into(),
            "40".into(),
        ],
        vec![
            "train-nlu".into(),
            "--data".into(),
            d("planting-poc.jsonl"),
            "--epochs".into(),
            "2".into(),
            "--out".into(),
            d("nlu.msds"),
        ],
        vec![
            "train-dm".into(),
            "--episodes".into(),
            d("planting-poc.episodes.jsonl"),
            "--game".into(),
            "planting".into(),
            "--epochs".into(),
            "3".into(),
            "--out".into(),
            d("dm.msds"),
        ],
        vec![
            "eval-e2e".into(),
            "--data".into(),
            d("planting-poc.jsonl"),
            "--episodes".into(),
            d("planting-poc.episodes.jsonl"),
            "--nlu".into(),
            d("nlu.msds"),
            "--dm".into(),
            d("dm.msds"),
            "--wer".into(),
            "0.3".into(),
            "--seed".into(),
            "5".into(),
            "--out".into(),
            d("e2e.json"),
        ],
    ];
    for step in steps {
        let args: Vec<&str> = step.iter().map(String::as_str).collect();
        let out = mathsds(&args, dir);
        assert!(
            out.status.success(),
            "step {:?} failed: {}",
            step,
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

fn criterion_determinism_and_report(gate: &mut Gate) {
    let tmp = tempfile::tempdir().unwrap();
    let dir_a = tmp.path().join("a");
    let dir_b = tmp.path().join("b");
    std::fs::create_dir_all(&dir_a).unwrap();
    std::fs::create_dir_all(&dir_b).unwrap();

    run_pipeline(&dir_a);
    run_pipeline(&dir_b);
    let bytes_a = std::fs::read(dir_a.join("e2e.json")).unwrap();
    let bytes_b = std::fs::read(dir_b.join("e2e.json")).unwrap();
    gate.check(
        10,
        "reproduction script is deterministic",
        bytes_a == bytes_b,
        format!(
            "two pipeline runs, evaluation JSON {} bytes vs {} bytes, byte-identical: {}",
            bytes_a.len(),
            bytes_b.len(),
            bytes_a == bytes_b
        ),
    );

    let rows_path = dir_a.join("rows.jsonl");
    let out = mathsds(
        &[
            "report-errors",
            "--data",
            dir_a.join("planting-poc.jsonl").to_str().unwrap(),
            "--model",
            dir_a.join("nlu.msds").to_str().unwrap(),
            "--wer",
            "0.3",
            "--seed",
            "5",
            "--out",
            rows_path.to_str().unwrap(),
        ],
        &dir_a,
    );
    let mut format_ok = out.status.success();
    let mut rows = 0usize;
    let mut corrupted = 0usize;
    let mut mispredicted = 0usize;
    if let Ok(text) = std::fs::read_to_string(&rows_path) {
        for line in text.lines() {
            rows += 1;
            match serde_json::from_str::<serde_json::Value>(line) {
                Ok(v) => {
                    let fields = [
                        "transcription",
                        "asr_output",
                        "gold_intent",
                        "predicted_intent",
                    ];
                    if !fields.iter().all(|f| v.get(f).map_or(false, |x| x.is_string())) {
                        format_ok = false;
                    }
                    if v["transcription"] != v["asr_output"] {
                        corrupted += 1;
                    }
                    if v["gold_intent"] != v["predicted_intent"] {
                        mispredicted += 1;
                    }
                }
                Err(_) => format_ok = false,
            }
        }
    } else {
        format_ok = false;
    }
    gate.check(
        11,
        "error report row format",
        format_ok && rows > 0 && corrupted > 0 && mispredicted > 0,
        format!(
            "{rows} rows with (transcription, asr output, gold, predicted); {corrupted} corrupted, {mispredicted} mispredicted"
        ),
    );
}

#[test]
fn primary_acceptance_gate() {
    let mut gate = Gate::new();

    let runs: Vec<CorpusRun> = ["planting-poc", "watering-poc"]
        .iter()
        .map(|name| run_corpus(name))
        .collect();

    let fidelity_ok = runs.iter().all(|r| {
        r.num_intents == r.target_num_intents
            && r.samples_ok
            && r.avg_words_ok
            && r.math_ok
            && r.gen_secs < 30.0
    });
    gate.check(
        1,
        "dataset fidelity",
        fidelity_ok,
        runs.iter()
            .map(|r| format!("{}: {} intents in {:.1}s", r.name, r.num_intents, r.gen_secs))
            .collect::<Vec<_>>()
            .join("; "),
    );

    let floor_ok = runs
        .iter()
        .all(|r| r.full_f1 >= 0.90 && r.nlu_train_secs < 600.0);
    gate.check(
        2,
        "nlu micro-f1 floor (held-out >= 0.90)",
        floor_ok,
        runs.iter()
            .map(|r| format!("{}: f1 {:.4} in {:.0}s", r.name, r.full_f1, r.nlu_train_secs))
            .collect::<Vec<_>>()
            .join("; "),
    );

    let ordering_ok = runs.iter().all(|r| r.full_f1 >= r.baseline_f1 - 0.005);
    gate.check(
        3,
        "full variant >= baseline (tolerance 0.5 points)",
        ordering_ok,
        runs.iter()
            .map(|r| format!("{}: full {:.4} vs baseline {:.4}", r.name, r.full_f1, r.baseline_f1))
            .collect::<Vec<_>>()
            .join("; "),
    );

    criterion_wer_oracle(&mut gate);

    let calib_ok = runs
        .iter()
        .all(|r| (0.28..=0.32).contains(&r.measured_wer) && r.calibrate_secs < 60.0);
    gate.check(
        5,
        "noise channel calibrates to wer 0.30 +/- 0.02",
        calib_ok,
        runs.iter()
            .map(|r| format!("{}: wer {:.3} in {:.1}s", r.name, r.measured_wer, r.calibrate_secs))
            .collect::<Vec<_>>()
            .join("; "),
    );

    let nlu_drops: Vec<f64> = runs
        .iter()
        .map(|r| (r.full_f1 - r.noisy_f1) * 100.0)
        .collect();
    let drop_ok = nlu_drops.iter().all(|d| *d >= 5.0);
    gate.check(
        6,
        "nlu degradation at wer 0.30 (>= 5 points)",
        drop_ok,
        runs.iter()
            .zip(&nlu_drops)
            .map(|(r, d)| format!("{}: {:.4} -> {:.4} ({d:.1} pts)", r.name, r.full_f1, r.noisy_f1))
            .collect::<Vec<_>>()
            .join("; "),
    );

    let dm_drops: Vec<f64> = runs
        .iter()
        .map(|r| (r.clean_dm_acc - r.noisy_dm_acc) * 100.0)
        .collect();
    let attenuation_ok = dm_drops
        .iter()
        .zip(&nlu_drops)
        .all(|(dm, nlu)| dm < nlu && *dm <= 0.6 * nlu);
    gate.check(
        7,
        "policy attenuates asr errors (dm drop <= 60% of nlu drop)",
        attenuation_ok,
        runs.iter()
            .zip(dm_drops.iter().zip(&nlu_drops))
            .map(|(r, (dm, nlu))| {
                format!("{}: dm {dm:.1} pts vs nlu {nlu:.1} pts", r.name)
            })
            .collect::<Vec<_>>()
            .join("; "),
    );

    criterion_crf_enumeration(&mut gate);
    criterion_gradient_checks(&mut gate);
    criterion_determinism_and_report(&mut gate);

    gate.finish();
}
