use std::io::{BufRead, Write};
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::grammar::{number_words, sample_utterance};
use crate::corpus::scenario::ScenarioGraph;
use crate::corpus::types::DatasetProfile;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actor {
    User,
    Agent,
    Event,
}

/// One dialogue turn: a user utterance with its gold intent, a gold agent
/// action, or a multimodal game event (with an optional number payload).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueTurn {
    pub actor: Actor,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intent: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub number: Option<u32>,
}

impl DialogueTurn {
    pub fn user(text: String, intent: &str) -> Self {
        DialogueTurn {
            actor: Actor::User,
            text: Some(text),
            intent: Some(intent.to_string()),
            event: None,
            action: None,
            number: None,
        }
    }

    pub fn agent(action: &str, number: Option<u32>) -> Self {
        DialogueTurn {
            actor: Actor::Agent,
            text: None,
            intent: None,
            event: None,
            action: Some(action.to_string()),
            number,
        }
    }

    pub fn event(event: &str, number: Option<u32>) -> Self {
        DialogueTurn {
            actor: Actor::Event,
            text: None,
            intent: None,
            event: Some(event.to_string()),
            action: None,
            number,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub session: String,
    pub turns: Vec<DialogueTurn>,
}

pub type EpisodeSet = Vec<Episode>;

/// Synthesize episodes by walking the game's scenario graph: agent turns
/// carry the gold action the graph's rules produce, so the policy's
/// training signal is consistent with the bundled state-tracking rules.
pub fn generate_episodes(
    profile: &DatasetProfile,
    num_episodes: usize,
    seed: u64,
) -> Result<EpisodeSet> {
    let graph = ScenarioGraph::for_game(profile.game);
    graph.validate()?;
    if num_episodes == 0 {
        return Err(Error::Validation("num_episodes must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut episodes = Vec::with_capacity(num_episodes);
    for e in 0..num_episodes {
        episodes.push(generate_episode(
            &graph,
            format!("{}-ep{e:04}", profile.name),
            &mut rng,
        )?);
    }
    Ok(episodes)
}

fn generate_episode(
    graph: &ScenarioGraph,
    session: String,
    rng: &mut ChaCha8Rng,
) -> Result<Episode> {
    let game = graph.game;
    let mut turns: Vec<DialogueTurn> = Vec::new();
    let mut prev_action: Option<String> = None;

    let push_user = |turns: &mut Vec<DialogueTurn>,
                         prev_action: &mut Option<String>,
                         intent: &str,
                         text: String|
     -> Result<()> {
        turns.push(DialogueTurn::user(text, intent));
        let action = graph.action_for_intent(intent, prev_action.as_deref())?;
        turns.push(DialogueTurn::agent(&action, None));
        *prev_action = Some(action);
        Ok(())
    };
    let push_event = |turns: &mut Vec<DialogueTurn>,
                      prev_action: &mut Option<String>,
                      event: &str,
                      number: Option<u32>|
     -> Result<()> {
        turns.push(DialogueTurn::event(event, number));
        let action = graph.action_for_event(event)?;
        turns.push(DialogueTurn::agent(&action, None));
        *prev_action = Some(action);
        Ok(())
    };

    push_event(&mut turns, &mut prev_action, "game-started", None)?;

    // Opening: what is this game / look at the meadow.
    let opening = match game {
        crate::corpus::types::Game::Planting => {
            if rng.gen_bool(0.5) {
                "intro-meadow"
            } else {
                "intro-game"
            }
        }
        crate::corpus::types::Game::Watering => "intro-game",
    };
    let (text, _) = sample_utterance(opening, game, rng);
    push_user(&mut turns, &mut prev_action, opening, text)?;

    // Ready check: affirm right after explain-game starts the first round.
    let (text, _) = sample_utterance("affirm", game, rng);
    push_user(&mut turns, &mut prev_action, "affirm", text)?;

    let rounds = rng.gen_range(2..=4);
    for round in 0..rounds {
        // The agent's give-number action carries the round target.
        let target = rng.gen_range(1..=100u32);
        if round > 0 {
            let (text, _) = sample_utterance("next-step", game, rng);
            push_user(&mut turns, &mut prev_action, "next-step", text)?;
        }
        if prev_action.as_deref() != Some("give-number") {
            turns.push(DialogueTurn::agent("give-number", Some(target)));
            prev_action = Some("give-number".into());
        } else if let Some(last) = turns.last_mut() {
            last.number = Some(target);
        }

        if rng.gen_bool(0.25) {
            let (text, _) = sample_utterance("ask-number", game, rng);
            push_user(&mut turns, &mut prev_action, "ask-number", text)?;
        }
        if game == crate::corpus::types::Game::Watering && rng.gen_bool(0.2) {
            let (text, _) = sample_utterance("ask-clue", game, rng);
            push_user(&mut turns, &mut prev_action, "ask-clue", text)?;
        }
        if rng.gen_bool(0.15) {
            let (text, _) = sample_utterance("out-of-scope", game, rng);
            push_user(&mut turns, &mut prev_action, "out-of-scope", text)?;
        }

        // Counting answer phrased around the actual target number.
        let count_text = match rng.gen_range(0..3) {
            0 => number_words(target),
            1 => format!("it's {}", number_words(target)),
            _ => format!("we just counted {}", number_words(target)),
        };
        push_user(&mut turns, &mut prev_action, "counting", count_text)?;

        let (wrong_event, done_event) = match game {
            crate::corpus::types::Game::Planting => ("wrong-pot-count", "pots-placed"),
            crate::corpus::types::Game::Watering => {
                ("wrong-number-touched", "correct-number-touched")
            }
        };
        if rng.gen_bool(0.3) {
            push_event(&mut turns, &mut prev_action, wrong_event, Some(target))?;
            let (text, _) = sample_utterance("counting", game, rng);
            push_user(&mut turns, &mut prev_action, "counting", text)?;
        }
        push_event(&mut turns, &mut prev_action, done_event, Some(target))?;

        if rng.gen_bool(0.3) {
            let follow = match game {
                crate::corpus::types::Game::Planting => "answer-flowers",
                crate::corpus::types::Game::Watering => "answer-water",
            };
            let (text, _) = sample_utterance(follow, game, rng);
            push_user(&mut turns, &mut prev_action, follow, text)?;
        }
    }

    push_event(&mut turns, &mut prev_action, "game-finished", None)?;
    let (text, _) = sample_utterance("goodbye", game, rng);
    push_user(&mut turns, &mut prev_action, "goodbye", text)?;

    Ok(Episode { session, turns })
}

pub fn save_episodes(episodes: &EpisodeSet, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for ep in episodes {
        serde_json::to_writer(&mut w, ep)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_episodes(path: &Path) -> Result<EpisodeSet> {
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut episodes = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let ep: Episode = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        episodes.push(ep);
    }
    Ok(episodes)
}
