use crate::corpus::types::Game;
use crate::error::{Error, Result};

/// Canonical intent ordering per game: generic intents first, then the
/// game-specific and late-curriculum ones, so a registry of any supported
/// size is a prefix of this list.
fn full_intent_list(game: Game) -> Vec<&'static str> {
    let mut intents = vec![
        "affirm",
        "deny",
        "next-step",
        "out-of-scope",
        "goodbye",
        "intro-game",
        "ask-number",
        "counting",
        "answer-valid",
        "answer-invalid",
    ];
    match game {
        Game::Planting => {
            intents.extend(["answer-flowers", "intro-meadow", "help-flowers", "done-planting"])
        }
        Game::Watering => intents.extend(["answer-water", "ask-clue", "done-watering"]),
    }
    intents
}

/// Intent registry of a given size (the proof-of-concept and deployment
/// corpora use different subsets, all between 11 and 14 labels).
pub fn intent_registry(game: Game, num_intents: usize) -> Result<Vec<String>> {
    let full = full_intent_list(game);
    if num_intents < 11 || num_intents > full.len() {
        return Err(Error::UnsatisfiableProfile(format!(
            "no {} intent registry of size {num_intents} (supported: 11..={})",
            game.as_str(),
            full.len()
        )));
    }
    Ok(full[..num_intents].iter().map(|s| s.to_string()).collect())
}

/// Agent action registry per game, used by the policy and the response
/// templates. The first entry is the configured session-start action.
pub fn action_registry(game: Game) -> Vec<String> {
    let mut actions = vec![
        "listen",
        "greet",
        "explain-game",
        "ask-ready",
        "give-number",
        "encourage-counting",
        "correct-gently",
        "repeat-number",
        "offer-help",
        "acknowledge",
        "celebrate",
        "say-goodbye",
    ];
    match game {
        Game::Planting => actions.extend(["praise-and-bloom", "ask-recount"]),
        Game::Watering => actions.extend(["praise-and-water", "give-clue"]),
    }
    actions.into_iter().map(|s| s.to_string()).collect()
}

/// Multimodal game-event registry per game (events reproducible without
/// audio-visual perception).
pub fn event_registry(game: Game) -> Vec<String> {
    let mut events = vec!["game-started", "game-finished"];
    match game {
        Game::Planting => events.extend(["pots-placed", "wrong-pot-count", "flowers-appeared"]),
        Game::Watering => events.extend([
            "correct-number-touched",
            "wrong-number-touched",
            "water-poured",
        ]),
    }
    events.into_iter().map(|s| s.to_string()).collect()
}
