//! Dialogue state tracking. State updates are pure: each input (user
//! intent, game event, or executed agent action) maps an old state to a
//! new one, recording a bounded feature history for the policy.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::corpus::{Game, ScenarioGraph};
use crate::error::{Error, Result};

/// One policy input to the dialogue: either something the user said
/// (already resolved to an intent) or a multimodal game event.
#[derive(Debug, Clone, PartialEq)]
pub enum TurnInput {
    UserIntent(String),
    Event { name: String, number: Option<u32> },
}

/// A snapshot the policy can featurize: what arrived, what the agent had
/// done just before, and the slot situation at that moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateStep {
    pub intent: Option<String>,
    pub event: Option<String>,
    pub prev_action: Option<String>,
    pub has_target: bool,
    pub any_completed: bool,
    pub any_wrong: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueState {
    pub game: Game,
    pub max_history: usize,
    pub history: VecDeque<StateStep>,
    pub current_target_number: Option<u32>,
    pub completed_targets: u32,
    pub wrong_attempts: u32,
    pub last_action: Option<String>,
}

impl DialogueState {
    pub fn new(game: Game, max_history: usize) -> Self {
        DialogueState {
            game,
            max_history: max_history.max(1),
            history: VecDeque::new(),
            current_target_number: None,
            completed_targets: 0,
            wrong_attempts: 0,
            last_action: None,
        }
    }
}

/// Fold a user/event input into the state. Validates names against the
/// scenario graph's registries and appends one history step.
pub fn track_input(
    state: &DialogueState,
    graph: &ScenarioGraph,
    input: &TurnInput,
) -> Result<DialogueState> {
    let mut next = state.clone();
    let step = match input {
        TurnInput::UserIntent(intent) => {
            if !graph.intents.iter().any(|i| i == intent) {
                return Err(Error::unknown_name("intent", intent, &graph.intents));
            }
            StateStep {
                intent: Some(intent.clone()),
                event: None,
                prev_action: state.last_action.clone(),
                has_target: state.current_target_number.is_some(),
                any_completed: state.completed_targets > 0,
                any_wrong: state.wrong_attempts > 0,
            }
        }
        TurnInput::Event { name, number } => {
            if !graph.events.iter().any(|e| e == name) {
                return Err(Error::unknown_name("event", name, &graph.events));
            }
            if graph.event_completes_target(name) {
                next.completed_targets += 1;
                next.current_target_number = None;
            } else if graph.event_is_wrong_attempt(name) {
                next.wrong_attempts += 1;
                if number.is_some() {
                    next.current_target_number = *number;
                }
            }
            StateStep {
                intent: None,
                event: Some(name.clone()),
                prev_action: state.last_action.clone(),
                has_target: state.current_target_number.is_some(),
                any_completed: state.completed_targets > 0,
                any_wrong: state.wrong_attempts > 0,
            }
        }
    };
    next.history.push_back(step);
    while next.history.len() > next.max_history {
        next.history.pop_front();
    }
    Ok(next)
}

/// Record the action the agent actually took (with any number it
/// announced, which becomes the new target for "give-number").
pub fn track_action(
    state: &DialogueState,
    graph: &ScenarioGraph,
    action: &str,
    number: Option<u32>,
) -> Result<DialogueState> {
    if !graph.actions.iter().any(|a| a == action) {
        return Err(Error::unknown_name("action", action, &graph.actions));
    }
    let mut next = state.clone();
    next.last_action = Some(action.to_string());
    if action == "give-number" && number.is_some() {
        next.current_target_number = number;
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph() -> ScenarioGraph {
        ScenarioGraph::for_game(Game::Planting)
    }

    #[test]
    fn tracking_is_pure() {
        let g = graph();
        let s0 = DialogueState::new(Game::Planting, 10);
        let before = s0.clone();
        let s1 = track_input(&s0, &g, &TurnInput::UserIntent("affirm".into())).unwrap();
        assert_eq!(s0, before);
        assert_eq!(s1.history.len(), 1);
    }

    #[test]
    fn unknown_event_is_registry_error() {
        let g = graph();
        let s0 = DialogueState::new(Game::Planting, 10);
        let err = track_input(
            &s0,
            &g,
            &TurnInput::Event {
                name: "meteor-strike".into(),
                number: None,
            },
        )
        .unwrap_err();
        assert!(err.to_string().contains("pots-placed"));
    }

    #[test]
    fn give_number_sets_target_and_completion_clears_it() {
        let g = graph();
        let s0 = DialogueState::new(Game::Planting, 10);
        let s1 = track_action(&s0, &g, "give-number", Some(42)).unwrap();
        assert_eq!(s1.current_target_number, Some(42));
        let s2 = track_input(
            &s1,
            &g,
            &TurnInput::Event {
                name: "pots-placed".into(),
                number: Some(42),
            },
        )
        .unwrap();
        assert_eq!(s2.current_target_number, None);
        assert_eq!(s2.completed_targets, 1);
        // the step recorded the pre-update slot values
        assert!(s2.history.back().unwrap().has_target);
    }

    #[test]
    fn wrong_attempts_accumulate() {
        let g = graph();
        let mut s = DialogueState::new(Game::Planting, 10);
        s = track_action(&s, &g, "give-number", Some(7)).unwrap();
        for _ in 0..2 {
            s = track_input(
                &s,
                &g,
                &TurnInput::Event {
                    name: "wrong-pot-count".into(),
                    number: Some(7),
                },
            )
            .unwrap();
        }
        assert_eq!(s.wrong_attempts, 2);
        assert_eq!(s.current_target_number, Some(7));
    }

    #[test]
    fn history_is_bounded() {
        let g = graph();
        let mut s = DialogueState::new(Game::Planting, 3);
        for _ in 0..8 {
            s = track_input(&s, &g, &TurnInput::UserIntent("counting".into())).unwrap();
        }
        assert_eq!(s.history.len(), 3);
    }
}
