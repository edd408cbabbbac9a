use crate::corpus::registry::{action_registry, event_registry, intent_registry};
use crate::corpus::types::Game;
use crate::error::{Error, Result};

/// Game flow definition: the registries plus the deterministic rules that
/// map the latest turn input (and a little context) to the gold agent
/// action, and game events to slot updates. Episode synthesis and
/// dialogue state tracking share these rules.
#[derive(Debug, Clone)]
pub struct ScenarioGraph {
    pub game: Game,
    pub intents: Vec<String>,
    pub events: Vec<String>,
    pub actions: Vec<String>,
    pub session_start_action: String,
}

impl ScenarioGraph {
    pub fn for_game(game: Game) -> Self {
        let num_intents = match game {
            Game::Planting => 14,
            Game::Watering => 13,
        };
        ScenarioGraph {
            game,
            intents: intent_registry(game, num_intents).expect("bundled registry"),
            events: event_registry(game),
            actions: action_registry(game),
            session_start_action: "greet".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.intents.is_empty() || self.events.is_empty() || self.actions.is_empty() {
            return Err(Error::Validation("empty scenario graph".into()));
        }
        if !self.actions.contains(&self.session_start_action) {
            return Err(Error::unknown_name(
                "action",
                &self.session_start_action,
                &self.actions,
            ));
        }
        Ok(())
    }

    /// Gold agent action after a user intent. `prev_action` is the
    /// agent's previous action, which disambiguates e.g. an "affirm"
    /// right after the game explanation (start a round) from a mid-game
    /// one (acknowledge).
    pub fn action_for_intent(&self, intent: &str, prev_action: Option<&str>) -> Result<String> {
        if !self.intents.iter().any(|i| i == intent) {
            return Err(Error::unknown_name("intent", intent, &self.intents));
        }
        let action = match intent {
            "intro-meadow" | "intro-game" => "explain-game",
            "affirm" => {
                if prev_action == Some("explain-game") || prev_action == Some("ask-ready") {
                    "give-number"
                } else {
                    "acknowledge"
                }
            }
            "deny" | "help-flowers" => "offer-help",
            "next-step" => "give-number",
            "ask-number" => "repeat-number",
            "ask-clue" => "give-clue",
            "counting" => "encourage-counting",
            "answer-flowers" | "answer-water" | "answer-valid" => "acknowledge",
            "answer-invalid" => "correct-gently",
            "out-of-scope" => "listen",
            "goodbye" => "say-goodbye",
            "done-planting" | "done-watering" => "celebrate",
            other => {
                return Err(Error::unknown_name("intent", other, &self.intents));
            }
        };
        Ok(action.to_string())
    }

    /// Gold agent action after a multimodal game event.
    pub fn action_for_event(&self, event: &str) -> Result<String> {
        if !self.events.iter().any(|e| e == event) {
            return Err(Error::unknown_name("event", event, &self.events));
        }
        let action = match event {
            "game-started" => "greet",
            "game-finished" => "celebrate",
            "pots-placed" => "praise-and-bloom",
            "wrong-pot-count" => "ask-recount",
            "flowers-appeared" => "celebrate",
            "correct-number-touched" => "praise-and-water",
            "wrong-number-touched" => "correct-gently",
            "water-poured" => "acknowledge",
            other => return Err(Error::unknown_name("event", other, &self.events)),
        };
        Ok(action.to_string())
    }

    /// Whether an event marks the current target number as solved.
    pub fn event_completes_target(&self, event: &str) -> bool {
        matches!(event, "pots-placed" | "correct-number-touched")
    }

    /// Whether an event is a failed attempt at the current target.
    pub fn event_is_wrong_attempt(&self, event: &str) -> bool {
        matches!(event, "wrong-pot-count" | "wrong-number-touched")
    }
}
