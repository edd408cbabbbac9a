//! Template-based response generation: each agent action maps to one or
//! more text templates with `{name}` slot placeholders, and rendering
//! picks a template uniformly at random.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Game;
use crate::error::{Error, Result};

/// Action name -> response templates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TemplateSet {
    pub templates: BTreeMap<String, Vec<String>>,
}

impl TemplateSet {
    /// Every action in the registry must have at least one template.
    pub fn validate(&self, action_registry: &[String]) -> Result<()> {
        for action in action_registry {
            match self.templates.get(action) {
                Some(list) if !list.is_empty() => {}
                _ => {
                    return Err(Error::Validation(format!(
                        "action {action:?} has no response template"
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }
}

/// Render a response for an action: uniform template choice, then slot
/// substitution. Unknown actions and unfilled placeholders are errors.
pub fn render_response<R: Rng>(
    action: &str,
    slots: &BTreeMap<String, String>,
    template_set: &TemplateSet,
    rng: &mut R,
) -> Result<String> {
    let options = template_set.templates.get(action).ok_or_else(|| {
        Error::unknown_name(
            "action",
            action,
            &template_set.templates.keys().cloned().collect::<Vec<_>>(),
        )
    })?;
    if options.is_empty() {
        return Err(Error::Validation(format!(
            "action {action:?} has an empty template list"
        )));
    }
    let template = &options[rng.gen_range(0..options.len())];

    let mut out = String::with_capacity(template.len());
    let mut rest = template.as_str();
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after.find('}').ok_or_else(|| {
            Error::Validation(format!("unbalanced placeholder in template {template:?}"))
        })?;
        let name = &after[..close];
        let value = slots.get(name).ok_or_else(|| {
            Error::Validation(format!("missing slot {name:?} for action {action:?}"))
        })?;
        out.push_str(value);
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Bundled response templates covering both games' action registries.
pub fn default_templates(game: Game) -> TemplateSet {
    let mut t: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    t.insert("listen", vec!["Mhm.", "I'm listening.", "Okay."]);
    t.insert(
        "greet",
        vec![
            "Hi there! I'm Oscar. Ready to play?",
            "Hello friends! Let's have some fun with numbers!",
            "Hey! Great to see you again!",
        ],
    );
    t.insert(
        "ask-ready",
        vec!["Are you ready to start?", "Shall we begin?"],
    );
    t.insert(
        "give-number",
        vec![
            "Let's make the number {number}!",
            "Can you find {number}?",
            "Our next number is {number}. Let's go!",
        ],
    );
    t.insert(
        "encourage-counting",
        vec![
            "Nice counting! Keep going!",
            "You're doing great, count them all!",
            "Good! How many is that together?",
        ],
    );
    t.insert(
        "correct-gently",
        vec![
            "Hmm, not quite. Let's try again!",
            "Almost! Give it another go.",
            "That's not it yet, but you're close!",
        ],
    );
    t.insert(
        "repeat-number",
        vec![
            "The number is {number}.",
            "We're looking for {number}. You can do it!",
        ],
    );
    t.insert(
        "offer-help",
        vec![
            "No problem, I can help! Let's do it together.",
            "Here's a tip: start with the big pots first.",
        ],
    );
    t.insert(
        "acknowledge",
        vec!["Got it!", "Okay!", "I see!", "Great job!"],
    );
    t.insert(
        "celebrate",
        vec![
            "Hooray! You did it!",
            "Amazing work, friends!",
            "Woohoo! That was fantastic!",
        ],
    );
    t.insert(
        "say-goodbye",
        vec![
            "Bye bye! See you next time!",
            "Goodbye friends! Keep counting!",
        ],
    );
    match game {
        Game::Planting => {
            t.insert(
                "explain-game",
                vec![
                    "In this game we plant flowers! Big pots are tens and small pots are ones.",
                    "Let's plant flowers together. Place the pots to build the number!",
                ],
            );
            t.insert(
                "praise-and-bloom",
                vec![
                    "Wonderful! Look, the flowers are blooming!",
                    "You placed them all! Here come the flowers!",
                ],
            );
            t.insert(
                "ask-recount",
                vec![
                    "Let's count the pots one more time.",
                    "Hmm, can you count them again for me?",
                ],
            );
        }
        Game::Watering => {
            t.insert(
                "explain-game",
                vec![
                    "In this game we water flowers! Touch the right number on the grid.",
                    "Let's water the flowers. Find the number on the big grid!",
                ],
            );
            t.insert(
                "praise-and-water",
                vec![
                    "Yes! That's the right number. Watering time!",
                    "You found it! Watch the water pour!",
                ],
            );
            t.insert(
                "give-clue",
                vec![
                    "Here's a clue: it has {number} in it... just kidding! Count the tens first.",
                    "Try counting by tens, then add the ones.",
                ],
            );
        }
    }
    TemplateSet {
        templates: t
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.into_iter().map(String::from).collect()))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_template_renders_exactly() {
        let set = TemplateSet {
            templates: [("praise".to_string(), vec!["Great job!".to_string()])]
                .into_iter()
                .collect(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = render_response("praise", &BTreeMap::new(), &set, &mut rng).unwrap();
        assert_eq!(out, "Great job!");
    }

    #[test]
    fn slot_substitution() {
        let set = TemplateSet {
            templates: [(
                "count".to_string(),
                vec!["Let's count to {number}!".to_string()],
            )]
            .into_iter()
            .collect(),
        };
        let slots: BTreeMap<String, String> = [("number".to_string(), "20".to_string())]
            .into_iter()
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = render_response("count", &slots, &set, &mut rng).unwrap();
        assert_eq!(out, "Let's count to 20!");
    }

    #[test]
    fn missing_slot_names_placeholder() {
        let set = TemplateSet {
            templates: [(
                "count".to_string(),
                vec!["Count to {number}!".to_string()],
            )]
            .into_iter()
            .collect(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = render_response("count", &BTreeMap::new(), &set, &mut rng).unwrap_err();
        assert!(err.to_string().contains("number"));
    }

    #[test]
    fn unknown_action_errors() {
        let set = default_templates(Game::Watering);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(render_response("no-such-action", &BTreeMap::new(), &set, &mut rng).is_err());
    }

    #[test]
    fn seeded_choice_sequence_is_reproducible() {
        let set = default_templates(Game::Planting);
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            (0..10)
                .map(|_| render_response("greet", &BTreeMap::new(), &set, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn uniform_selection_over_four_templates() {
        let set = TemplateSet {
            templates: [(
                "a".to_string(),
                vec!["t0", "t1", "t2", "t3"]
                    .into_iter()
                    .map(String::from)
                    .collect(),
            )]
            .into_iter()
            .collect(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = BTreeMap::new();
        for _ in 0..10_000 {
            let out = render_response("a", &BTreeMap::new(), &set, &mut rng).unwrap();
            *counts.entry(out).or_insert(0usize) += 1;
        }
        for (_, c) in counts {
            let freq = c as f64 / 10_000.0;
            assert!((0.22..=0.28).contains(&freq), "frequency {freq}");
        }
    }

    #[test]
    fn bundled_templates_cover_registries() {
        for game in [Game::Planting, Game::Watering] {
            default_templates(game)
                .validate(&crate::corpus::action_registry(game))
                .unwrap();
        }
    }

    #[test]
    fn no_unresolved_placeholder_survives() {
        let set = default_templates(Game::Watering);
        let slots: BTreeMap<String, String> = [("number".to_string(), "14".to_string())]
            .into_iter()
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for action in crate::corpus::action_registry(Game::Watering) {
            for _ in 0..8 {
                let out = render_response(&action, &slots, &set, &mut rng).unwrap();
                assert!(!out.contains('{') && !out.contains('}'), "{out}");
            }
        }
    }
}
