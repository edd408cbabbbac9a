//! `mathsds`: generate game corpora, train and evaluate the NLU and
//! dialogue policy models, simulate ASR noise, and chat with the agent.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mathsds_core::asr_sim::{calibrate, corrupt, NoiseChannelConfig};
use mathsds_core::corpus::{
    self, compute_stats, generate_dataset, generate_episodes, load_dataset,
    load_episodes, load_header, profile_by_name, save_dataset, save_episodes, DialogueTurn,
    Episode, Game, ScenarioGraph, Source,
};
use mathsds_core::dm::{
    load_dm, save_dm, select_action, track_action, track_input, train_dm, DialogueState, DmConfig,
    TurnInput,
};
use mathsds_core::eval::{
    error_report, format_error_table, format_transcript_table, mispredicted_rows,
    run_condition, save_transcript_rows, summarize_e2e, transcript_rows, PipelineCondition,
};
use mathsds_core::featurize::{tokenize, DenseProvider, EmbeddingCache};
use mathsds_core::nlg::{default_templates, render_response, TemplateSet};
use mathsds_core::nlu::{
    load_nlu, predict_intent, save_nlu, split_dataset, train_nlu, NluConfig,
};
use mathsds_core::{Error, Result};

#[derive(Parser)]
#[command(name = "mathsds", version, about = "Task-oriented dialogue framework for early-math games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Full,
    Baseline,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset (and episodes) from a bundled profile
    GenData {
        /// Profile name, e.g. planting-poc, watering-deploy
        #[arg(long)]
        profile: String,
        /// Output directory (default: $MATHSDS_DATA_DIR or ./data)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the profile's generation seed
        #[arg(long)]
        seed: Option<u64>,
        /// Number of dialogue episodes to synthesize
        #[arg(long, default_value_t = 200)]
        episodes: usize,
    },
    /// Print corpus statistics for a dataset file
    Stats {
        #[arg(long)]
        data: PathBuf,
    },
    /// Train the intent/entity model
    TrainNlu {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Full)]
        variant: VariantArg,
        /// Model output path (default: <data dir>/nlu-<variant>.msds)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dense features: "hash", "hash:DIM:SEED", or "cache:PATH"
        #[arg(long, default_value = "hash")]
        dense: String,
        /// Hold out this fraction for evaluation during training
        #[arg(long, default_value_t = 0.0)]
        eval_fraction: f64,
    },
    /// Evaluate a trained NLU model on a dataset
    EvalNlu {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "hash")]
        dense: String,
        /// Corrupt transcripts to this WER before evaluating
        #[arg(long)]
        wer: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write an ASR-degraded copy of a dataset at a target WER
    SimulateAsr {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        wer: f64,
        /// Output path (default: alongside input with a .werNN suffix)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Train the dialogue policy from episodes
    TrainDm {
        #[arg(long)]
        episodes: PathBuf,
        #[arg(long)]
        game: Game,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the clean and ASR-degraded pipeline end to end and compare
    EvalE2e {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        episodes: PathBuf,
        #[arg(long)]
        nlu: PathBuf,
        #[arg(long)]
        dm: PathBuf,
        #[arg(long, default_value_t = 0.3)]
        wer: f64,
        #[arg(long, default_value = "hash")]
        dense: String,
        /// Write the full JSON summary here as well
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mispredicted transcripts and a per-intent breakdown for an NLU model
    ReportErrors {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "hash")]
        dense: String,
        #[arg(long)]
        wer: Option<f64>,
        /// Also write rows as JSON lines here
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Interactive session with the trained agent
    Chat {
        #[arg(long)]
        nlu: PathBuf,
        #[arg(long)]
        dm: PathBuf,
        /// Response templates JSON (default: bundled templates)
        #[arg(long)]
        templates: Option<PathBuf>,
        #[arg(long, default_value = "hash")]
        dense: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Save the session transcript as episode JSON lines
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
}

fn data_dir() -> PathBuf {
    std::env::var_os("MATHSDS_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"))
}

fn parse_dense(spec: &str) -> Result<DenseProvider> {
    if spec == "hash" {
        return Ok(DenseProvider::Hash { dim: 64, seed: 0 });
    }
    if let Some(rest) = spec.strip_prefix("hash:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 2 {
            return Err(Error::Validation(format!(
                "dense spec {spec:?}: expected hash:DIM:SEED"
            )));
        }
        let dim = parts[0]
            .parse()
            .map_err(|_| Error::Validation(format!("bad dense dim {:?}", parts[0])))?;
        let seed = parts[1]
            .parse()
            .map_err(|_| Error::Validation(format!("bad dense seed {:?}", parts[1])))?;
        return Ok(DenseProvider::Hash { dim, seed });
    }
    if let Some(path) = spec.strip_prefix("cache:") {
        let cache = EmbeddingCache::load(Path::new(path))?;
        let name = Path::new(path)
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "cache".into());
        return Ok(DenseProvider::Cache {
            name,
            cache,
            fallback_seed: 0,
        });
    }
    Err(Error::Validation(format!(
        "dense spec {spec:?}: expected \"hash\", \"hash:DIM:SEED\", or \"cache:PATH\""
    )))
}

fn noise_for(data: &corpus::Dataset, wer: f64, seed: u64) -> Result<NoiseChannelConfig> {
    let corpus_tokens: Vec<Vec<String>> = data.iter().map(|u| tokenize(&u.text)).collect();
    let base = NoiseChannelConfig::silent(seed)
        .with_pool_from_tokens(corpus_tokens.iter().flatten().map(String::as_str));
    calibrate(wer, &corpus_tokens, &base)
}

fn episodes_path_for(dataset_path: &Path) -> PathBuf {
    let stem = dataset_path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "dataset".into());
    dataset_path.with_file_name(format!("{stem}.episodes.jsonl"))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenData {
            profile,
            out,
            seed,
            episodes,
        } => {
            let mut profile = profile_by_name(&profile)?;
            if let Some(seed) = seed {
                profile.seed = seed;
            }
            let dir = out.unwrap_or_else(data_dir);
            std::fs::create_dir_all(&dir)?;
            let dataset = generate_dataset(&profile)?;
            let dataset_path = dir.join(format!("{}.jsonl", profile.name));
            save_dataset(&dataset, &dataset_path)?;
            let eps = generate_episodes(&profile, episodes, profile.seed ^ 0x5051)?;
            let eps_path = episodes_path_for(&dataset_path);
            save_episodes(&eps, &eps_path)?;
            let stats = compute_stats(&dataset)?;
            println!("{}", serde_json::to_string_pretty(&stats)?);
            eprintln!(
                "wrote {} utterances to {} (+ header) and {} episodes to {}",
                dataset.len(),
                dataset_path.display(),
                eps.len(),
                eps_path.display()
            );
        }
        Command::Stats { data } => {
            let dataset = load_dataset(&data)?;
            let stats = compute_stats(&dataset)?;
            println!("{}", serde_json::to_string_pretty(&stats)?);
        }
        Command::TrainNlu {
            data,
            variant,
            out,
            epochs,
            seed,
            dense,
            eval_fraction,
        } => {
            let dataset = load_dataset(&data)?;
            let header = load_header(&data)?;
            let provider = parse_dense(&dense)?;
            let mut config = match variant {
                VariantArg::Full => NluConfig::full(),
                VariantArg::Baseline => NluConfig::baseline(),
            };
            config.seed = seed;
            if let Some(e) = epochs {
                config.epochs = e;
            }
            if !(0.0..1.0).contains(&eval_fraction) {
                return Err(Error::Validation(format!(
                    "eval fraction {eval_fraction} outside [0, 1)"
                )));
            }
            let (train_split, eval_split) = if eval_fraction > 0.0 {
                split_dataset(&dataset, eval_fraction, seed)
            } else {
                (dataset, Vec::new())
            };
            let (model, report) = train_nlu(&train_split, &header.intents, &config, &provider)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let out = out.unwrap_or_else(|| {
                let tag = match variant {
                    VariantArg::Full => "full",
                    VariantArg::Baseline => "baseline",
                };
                data.with_file_name(format!("nlu-{tag}.msds"))
            });
            save_nlu(&model, &out)?;
            let mut summary = serde_json::json!({
                "model": out.display().to_string(),
                "train_samples": report.num_samples,
                "final_loss": report.epoch_losses.last(),
            });
            if !eval_split.is_empty() {
                let rep = run_condition(
                    &eval_split,
                    None,
                    &model,
                    &provider,
                    None,
                    &PipelineCondition::clean(),
                )?;
                summary["heldout_micro_f1"] = serde_json::json!(rep.intent_micro_f1);
                summary["heldout_samples"] = serde_json::json!(rep.num_utterances);
            }
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::EvalNlu {
            data,
            model,
            dense,
            wer,
            seed,
        } => {
            let dataset = load_dataset(&data)?;
            let model = load_nlu(&model)?;
            let provider = parse_dense(&dense)?;
            let condition = match wer {
                Some(w) => PipelineCondition::noisy(
                    &format!("wer-{w:.2}"),
                    noise_for(&dataset, w, seed)?,
                ),
                None => PipelineCondition::clean(),
            };
            let report = run_condition(&dataset, None, &model, &provider, None, &condition)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report.without_transcripts())?
            );
        }
        Command::SimulateAsr {
            data,
            wer,
            out,
            seed,
        } => {
            let dataset = load_dataset(&data)?;
            let noise = noise_for(&dataset, wer, seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut noisy = dataset.clone();
            let mut total_edits = 0usize;
            let mut total_ref = 0usize;
            for u in &mut noisy {
                let reference = tokenize(&u.text);
                let hyp = corrupt(&reference, &noise, &mut rng);
                let align = mathsds_core::asr_sim::word_error_rate(&reference, &hyp)?;
                total_edits += align.substitutions + align.deletions + align.insertions;
                total_ref += align.reference_len;
                u.text = hyp.join(" ");
                u.source = Source::Asr;
                u.entities.clear(); // spans no longer line up with the text
            }
            noisy.retain(|u| !u.text.is_empty());
            let out = out.unwrap_or_else(|| {
                let stem = data
                    .file_stem()
                    .map(|s| s.to_string_lossy().to_string())
                    .unwrap_or_else(|| "dataset".into());
                data.with_file_name(format!("{stem}.wer{:02}.jsonl", (wer * 100.0).round()))
            });
            save_dataset(&noisy, &out)?;
            let achieved = total_edits as f64 / total_ref.max(1) as f64;
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "target_wer": wer,
                    "achieved_wer": achieved,
                    "p_sub": noise.p_sub,
                    "p_del": noise.p_del,
                    "p_ins": noise.p_ins,
                    "output": out.display().to_string(),
                    "kept": noisy.len(),
                }))?
            );
        }
        Command::TrainDm {
            episodes,
            game,
            out,
            epochs,
            seed,
        } => {
            let eps = load_episodes(&episodes)?;
            let graph = ScenarioGraph::for_game(game);
            let mut config = DmConfig {
                seed,
                ..DmConfig::default()
            };
            if let Some(e) = epochs {
                config.epochs = e;
            }
            let (model, report) = train_dm(&eps, &graph, &config)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let out = out.unwrap_or_else(|| episodes.with_file_name("dm.msds"));
            save_dm(&model, &out)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "model": out.display().to_string(),
                    "train_samples": report.num_samples,
                    "final_loss": report.epoch_losses.last(),
                }))?
            );
        }
        Command::EvalE2e {
            data,
            episodes,
            nlu,
            dm,
            wer,
            dense,
            out,
            seed,
        } => {
            let dataset = load_dataset(&data)?;
            let eps = load_episodes(&episodes)?;
            let nlu_model = load_nlu(&nlu)?;
            let dm_model = load_dm(&dm)?;
            let provider = parse_dense(&dense)?;
            let clean = run_condition(
                &dataset,
                Some(&eps),
                &nlu_model,
                &provider,
                Some(&dm_model),
                &PipelineCondition::clean(),
            )?;
            let noise = noise_for(&dataset, wer, seed)?;
            let degraded = run_condition(
                &dataset,
                Some(&eps),
                &nlu_model,
                &provider,
                Some(&dm_model),
                &PipelineCondition::noisy(&format!("wer-{wer:.2}"), noise),
            )?;
            let summary = summarize_e2e(clean, degraded);
            let trimmed = serde_json::json!({
                "clean": summary.clean.without_transcripts(),
                "degraded": summary.degraded.without_transcripts(),
                "nlu_drop_points": summary.nlu_drop_points,
                "dm_drop_points": summary.dm_drop_points,
            });
            if let Some(out) = out {
                std::fs::write(&out, serde_json::to_vec_pretty(&trimmed)?)?;
            }
            println!("{}", serde_json::to_string_pretty(&trimmed)?);
        }
        Command::ReportErrors {
            data,
            model,
            dense,
            wer,
            out,
            seed,
        } => {
            let dataset = load_dataset(&data)?;
            let model = load_nlu(&model)?;
            let provider = parse_dense(&dense)?;
            let condition = match wer {
                Some(w) => PipelineCondition::noisy(
                    &format!("wer-{w:.2}"),
                    noise_for(&dataset, w, seed)?,
                ),
                None => PipelineCondition::clean(),
            };
            let eval = run_condition(&dataset, None, &model, &provider, None, &condition)?;
            let rows = transcript_rows(&eval)?;
            let wrong = mispredicted_rows(&rows);
            if wrong.is_empty() {
                println!("no intent errors over {} utterances", rows.len());
            } else {
                print!("{}", format_transcript_table(&wrong));
                println!(
                    "{} mispredicted of {} utterances\n",
                    wrong.len(),
                    rows.len()
                );
            }
            let report = error_report(&eval.gold_intents, &eval.predicted_intents)?;
            print!("{}", format_error_table(&report));
            if let Some(out) = out {
                save_transcript_rows(&rows, &out)?;
            }
        }
        Command::Chat {
            nlu,
            dm,
            templates,
            dense,
            seed,
            transcript,
        } => {
            let nlu_model = load_nlu(&nlu)?;
            let dm_model = load_dm(&dm)?;
            let provider = parse_dense(&dense)?;
            let game = dm_model.game;
            let template_set = match templates {
                Some(path) => TemplateSet::load(&path)?,
                None => default_templates(game),
            };
            template_set.validate(&dm_model.actions)?;
            chat_loop(
                &nlu_model,
                &dm_model,
                &provider,
                &template_set,
                seed,
                transcript.as_deref(),
            )?;
        }
    }
    Ok(())
}

fn chat_loop(
    nlu: &mathsds_core::nlu::NluModel,
    dm: &mathsds_core::dm::DmModel,
    provider: &DenseProvider,
    templates: &TemplateSet,
    seed: u64,
    transcript: Option<&Path>,
) -> Result<()> {
    let game = dm.game;
    let graph = ScenarioGraph::for_game(game);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = DialogueState::new(game, dm.config.max_history);
    let mut turns: Vec<DialogueTurn> = Vec::new();

    let respond = |state: &mut DialogueState,
                       turns: &mut Vec<DialogueTurn>,
                       rng: &mut ChaCha8Rng|
     -> Result<()> {
        let pred = select_action(dm, state)?;
        let number = match pred.action.as_str() {
            "give-number" => Some(rng.gen_range(1..=100u32)),
            _ => state.current_target_number,
        };
        let mut slots: BTreeMap<String, String> = BTreeMap::new();
        if let Some(n) = number {
            slots.insert("number".into(), corpus::grammar::number_words(n));
        }
        let text = render_response(&pred.action, &slots, templates, rng)?;
        println!("oscar [{} {:.2}]: {text}", pred.action, pred.confidence);
        turns.push(DialogueTurn::agent(&pred.action, number));
        *state = track_action(state, &graph, &pred.action, number)?;
        Ok(())
    };

    // the session opens like a fresh game
    state = track_input(
        &state,
        &graph,
        &TurnInput::Event {
            name: "game-started".into(),
            number: None,
        },
    )?;
    turns.push(DialogueTurn::event("game-started", None));
    respond(&mut state, &mut turns, &mut rng)?;

    eprintln!("(type to talk, \"/event NAME [NUMBER]\" to fire a game event, \"/quit\" to leave)");
    let stdin = std::io::stdin();
    for line in stdin.lock().lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "/quit" {
            break;
        }
        if let Some(rest) = line.strip_prefix("/event") {
            let mut parts = rest.split_whitespace();
            let Some(name) = parts.next() else {
                eprintln!("usage: /event NAME [NUMBER]  (events: {})", graph.events.join(", "));
                continue;
            };
            let number: Option<u32> = parts.next().and_then(|n| n.parse().ok());
            match track_input(
                &state,
                &graph,
                &TurnInput::Event {
                    name: name.to_string(),
                    number,
                },
            ) {
                Ok(next) => {
                    state = next;
                    turns.push(DialogueTurn::event(name, number));
                    respond(&mut state, &mut turns, &mut rng)?;
                }
                Err(e) => eprintln!("{e}"),
            }
            continue;
        }
        let pred = predict_intent(nlu, provider, line)?;
        let intent = if graph.intents.iter().any(|i| i == &pred.intent) {
            pred.intent.clone()
        } else {
            "out-of-scope".to_string()
        };
        eprintln!("(heard intent: {intent} {:.2})", pred.confidence);
        state = track_input(&state, &graph, &TurnInput::UserIntent(intent.clone()))?;
        turns.push(DialogueTurn::user(line.to_string(), &intent));
        respond(&mut state, &mut turns, &mut rng)?;
        if intent == "goodbye" {
            break;
        }
    }

    if let Some(path) = transcript {
        let episode = Episode {
            session: format!("chat-{seed}"),
            turns,
        };
        save_episodes(&vec![episode], path)?;
        eprintln!("transcript saved to {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
