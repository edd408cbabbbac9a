use rand::prelude::*;

use crate::corpus::types::{EntitySpan, Game};

/// English words for 1..=100 ("twenty four" style, no hyphens).
pub fn number_words(n: u32) -> String {
    const ONES: [&str; 20] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
        "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
        "nineteen",
    ];
    const TENS: [&str; 10] = [
        "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
    ];
    match n {
        0..=19 => ONES[n as usize].to_string(),
        20..=99 => {
            let t = TENS[(n / 10) as usize];
            if n % 10 == 0 {
                t.to_string()
            } else {
                format!("{t} {}", ONES[(n % 10) as usize])
            }
        }
        100 => "one hundred".to_string(),
        _ => n.to_string(),
    }
}

/// "four tens and two ones" phrasing used in the tens-and-ones games.
pub fn tens_ones_words(n: u32) -> String {
    let tens = n / 10;
    let ones = n % 10;
    match (tens, ones) {
        (0, o) => format!("{} ones", number_words(o)),
        (t, 0) => format!("{} tens", number_words(t)),
        (t, o) => format!("{} tens and {} ones", number_words(t), number_words(o)),
    }
}

/// One text segment during template expansion; number segments become
/// entity spans.
enum Segment {
    Lit(&'static str),
    Owned(String),
    Number { words: String, value: u32 },
}

/// Expand segments into (text, entity spans) with character offsets.
fn assemble(segments: Vec<Segment>) -> (String, Vec<EntitySpan>) {
    let mut text = String::new();
    let mut entities = Vec::new();
    for seg in segments {
        if !text.is_empty() {
            text.push(' ');
        }
        let start = text.chars().count();
        match seg {
            Segment::Lit(s) => text.push_str(s),
            Segment::Owned(s) => text.push_str(&s),
            Segment::Number { words, value } => {
                text.push_str(&words);
                entities.push(EntitySpan {
                    start,
                    end: start + words.chars().count(),
                    entity_type: "number".into(),
                    value: value.to_string(),
                });
            }
        }
    }
    (text, entities)
}

/// Fixed-phrase templates per intent; `<n>` marks a number slot.
fn templates(intent: &str, game: Game) -> &'static [&'static str] {
    match intent {
        "affirm" => &[
            "yes", "yeah", "yep", "sure", "okay", "yes please", "of course", "uh huh",
            "yeah let's do it", "okay sure", "I think so", "yes we can",
        ],
        "deny" => &[
            "no", "nope", "no way", "not yet", "no thank you", "nah", "I don't think so",
            "no not that one", "no we didn't",
        ],
        "next-step" => &[
            "what's next", "let's move on", "next one please", "can we do the next one",
            "I want the next game", "let's keep going", "what do we do next", "move on",
        ],
        "goodbye" => &[
            "bye", "bye bye", "bye bye oscar", "goodbye", "see you later", "bye oscar",
            "I have to go now bye", "see you tomorrow", "goodbye oscar",
        ],
        "intro-game" => &[
            "how do we play", "what is this game", "tell me about the game",
            "how does this work", "what do we do now", "can you show us how to play",
            "what game is this", "how do we start",
        ],
        "ask-number" => &[
            "what number is it", "which number should I find", "how many do we need",
            "what number are we making", "can you tell me the number again",
            "what's the number", "how many was it again", "which one do we touch",
        ],
        "counting" => &[
            "<n>", "<n>", "<n>", "it's <n>", "I counted <n>", "we just counted <n>",
            "I think it's <n>", "that makes <n>", "we got <n>", "<t>", "it's <t>",
            "one two three", "one two three four five", "let's count",
        ],
        "answer-valid" => &[
            "that's right", "we did it", "I got it right", "it worked", "we found it",
            "that was the right one", "we got it",
        ],
        "answer-invalid" => &[
            "that's wrong", "oops that's not it", "we made a mistake", "that's not right",
            "not that one", "we picked the wrong one",
        ],
        "answer-flowers" => &[
            "<n> flowers", "sunflowers", "I planted <n> flowers", "we need <n> flowers",
            "there are <n> flowers", "daisies", "roses", "we planted <n> flowers",
            "the flowers are blooming",
        ],
        "intro-meadow" => &[
            "look at the meadow", "wow flowers everywhere", "I see the meadow",
            "the meadow is so pretty", "there's a meadow with flowers",
            "look at all the flowers in the meadow",
        ],
        "help-flowers" => &[
            "can you help me plant", "I need help with the pots",
            "help me with the flowers please", "I don't know how to plant these",
            "can you help us",
        ],
        "done-planting" => &[
            "we planted them all", "all done planting", "I'm done with the pots",
            "we finished planting", "we're done",
        ],
        "answer-water" => &[
            "the flowers need water", "water could help them bloom", "we should water them",
            "they need more water", "water makes them grow", "let's water the flowers",
            "they're thirsty",
        ],
        "ask-clue" => &[
            "can I have a clue", "give me a hint please", "what's the clue", "I need a hint",
            "can you help with a clue",
        ],
        "done-watering" => &[
            "we watered them all", "all done watering", "the flowers are all watered",
            "I finished watering", "we're done watering",
        ],
        "out-of-scope" => &[
            // Short chit-chat seeds; the generator extends these with
            // filler words to calibrate corpus length and vocabulary.
            "my teacher said", "I like your hat", "guess what happened", "this is fun",
            "my little brother", "at recess today", "do you know my friend", "I'm hungry",
        ],
        _ => {
            let _ = game;
            &["hmm"]
        }
    }
}

const JITTER_PREFIXES: [&str; 6] = ["um", "uh", "well", "hmm", "oh", "hey"];

/// Sample one utterance for an intent: template choice, number fill, and
/// light lexical jitter.
pub fn sample_utterance<R: Rng>(
    intent: &str,
    game: Game,
    rng: &mut R,
) -> (String, Vec<EntitySpan>) {
    let options = templates(intent, game);
    let template = options[rng.gen_range(0..options.len())];

    let mut segments: Vec<Segment> = Vec::new();
    if rng.gen::<f64>() < 0.12 {
        segments.push(Segment::Lit(JITTER_PREFIXES[rng.gen_range(0..JITTER_PREFIXES.len())]));
    }
    for word in template.split_whitespace() {
        match word {
            "<n>" => {
                let n = rng.gen_range(1..=100);
                segments.push(Segment::Number {
                    words: number_words(n),
                    value: n,
                });
            }
            "<t>" => {
                let n = rng.gen_range(10..=99);
                segments.push(Segment::Number {
                    words: tens_ones_words(n),
                    value: n,
                });
            }
            lit => segments.push(Segment::Owned(lit.to_string())),
        }
    }
    assemble(segments)
}

/// Filler vocabulary for chit-chat padding: curated regular base words
/// plus simple inflections, deterministically ordered.
pub fn filler_pool() -> Vec<String> {
    const NOUNS: [&str; 231] = [
        "dog", "cat", "ball", "book", "chair", "table", "school", "friend", "sister", "brother",
        "mom", "dad", "grandma", "grandpa", "teacher", "house", "car", "truck", "train", "plane",
        "boat", "bike", "park", "tree", "leaf", "branch", "rock", "hill", "river", "lake",
        "ocean", "beach", "sand", "shell", "star", "moon", "sun", "cloud", "rain", "snow",
        "wind", "storm", "rainbow", "bird", "duck", "frog", "fish", "shark", "whale", "turtle",
        "rabbit", "mouse", "horse", "cow", "pig", "sheep", "goat", "chicken", "lion", "tiger",
        "bear", "monkey", "elephant", "giraffe", "zebra", "snake", "spider", "ant", "bee",
        "butterfly", "worm", "dinosaur", "dragon", "robot", "rocket", "castle", "tower", "bridge",
        "road", "street", "store", "market", "kitchen", "bedroom", "window", "door", "floor",
        "wall", "roof", "garden", "yard", "fence", "gate", "swing", "slide", "sandbox", "toy",
        "doll", "puzzle", "game", "card", "crayon", "pencil", "marker", "paper", "paint",
        "picture", "drawing", "story", "song", "dance", "movie", "show", "snack", "lunch",
        "dinner", "breakfast", "apple", "banana", "orange", "grape", "berry", "melon", "peach",
        "pear", "carrot", "potato", "tomato", "corn", "bread", "cheese", "milk", "juice",
        "cookie", "cake", "candy", "pizza", "sandwich", "soup", "egg", "butter", "honey",
        "sugar", "salt", "cup", "plate", "bowl", "spoon", "fork", "bottle", "box", "bag",
        "basket", "bucket", "hat", "coat", "shirt", "sock", "shoe", "boot", "glove", "scarf",
        "button", "pocket", "zipper", "backpack", "desk", "shelf", "lamp", "clock", "phone",
        "computer", "tablet", "camera", "mirror", "pillow", "blanket", "bed", "couch", "rug",
        "stair", "garage", "basement", "attic", "farm", "barn", "field", "forest", "cave",
        "mountain", "valley", "island", "desert", "jungle", "zoo", "circus", "library", "museum",
        "hospital", "doctor", "nurse", "police", "firefighter", "pilot", "farmer", "baker",
        "painter", "singer", "dancer", "player", "team", "coach", "winner", "prize", "medal",
        "ticket", "letter", "stamp", "present", "balloon", "party", "birthday", "holiday",
        "summer", "winter", "spring", "morning", "evening", "night", "minute", "hour",
    ];
    const VERBS: [&str; 119] = [
        "jump", "play", "look", "walk", "talk", "laugh", "smile", "wave", "clap", "point",
        "push", "pull", "lift", "carry", "drop", "pick", "roll", "toss", "kick", "catch",
        "climb", "crawl", "hop", "skip", "march", "race", "chase", "follow", "lead", "help",
        "share", "trade", "show", "tell", "ask", "answer", "call", "shout", "whisper", "listen",
        "watch", "stare", "peek", "search", "hunt", "gather", "collect", "sort", "stack",
        "build", "fix", "open", "close", "lock", "turn", "spin", "twist", "bend", "stretch",
        "reach", "touch", "pat", "rub", "scratch", "tickle", "hug", "kiss", "visit", "travel",
        "explore", "discover", "learn", "study", "practice", "remember", "forget", "dream",
        "wish", "hope", "want", "need", "like", "love", "enjoy", "start", "finish", "stop",
        "wait", "stay", "leave", "return", "arrive", "hurry", "rest", "sleep", "wake", "yawn",
        "cook", "bake", "mix", "pour", "taste", "smell", "clean", "wash", "dry", "fold",
        "hang", "paint", "draw", "color", "cut", "glue", "tape", "wrap", "pack", "plant",
        "water", "grow",
    ];
    const ADJS: [&str; 90] = [
        "quick", "slow", "loud", "quiet", "bright", "dark", "warm", "cold", "soft", "hard",
        "smooth", "rough", "clean", "dirty", "happy", "sad", "silly", "serious", "kind", "mean",
        "brave", "shy", "proud", "calm", "sleepy", "hungry", "thirsty", "tall", "short", "long",
        "wide", "narrow", "deep", "shallow", "heavy", "light", "full", "empty", "new", "old",
        "young", "fresh", "sweet", "sour", "salty", "spicy", "juicy", "crunchy", "sticky",
        "slippery", "fuzzy", "furry", "shiny", "sparkly", "colorful", "plain", "fancy", "neat",
        "messy", "busy", "lazy", "careful", "careless", "lucky", "strange", "normal", "special",
        "plastic", "wooden", "metal", "paper", "glass", "rubber", "purple", "yellow", "green",
        "blue", "red", "pink", "orange", "brown", "black", "white", "gray", "golden", "silver",
        "striped", "spotted", "tiny", "giant",
    ];
    const MISC: [&str; 60] = [
        "really", "very", "maybe", "always", "never", "sometimes", "often", "again", "soon",
        "later", "today", "tomorrow", "yesterday", "here", "there", "everywhere", "outside",
        "inside", "upstairs", "downstairs", "together", "alone", "almost", "already", "still",
        "just", "only", "even", "also", "too", "instead", "because", "while", "until", "before",
        "after", "during", "about", "around", "between", "under", "over", "behind", "beside",
        "near", "far", "away", "along", "across", "through", "actually", "probably", "suddenly",
        "finally", "quickly", "slowly", "quietly", "loudly", "carefully", "gently",
    ];

    const EXTRA: [&str; 119] = [
        "children", "people", "feet", "teeth", "mice", "geese", "men", "women", "went", "gone",
        "ran", "said", "saw", "seen", "made", "did", "done", "got", "gotten", "took", "taken",
        "gave", "given", "found", "came", "knew", "known", "thought", "brought", "bought",
        "caught", "taught", "held", "kept", "slept", "stood", "sat", "ate", "eaten", "drank",
        "sang", "swam", "flew", "grew", "drew", "threw", "blew", "wore", "tore", "rode",
        "wrote", "broke", "spoke", "woke", "chose", "froze", "drove", "fell", "felt", "left",
        "meant", "sent", "spent", "built", "lost", "heard", "told", "sold", "better", "best",
        "worse", "worst", "bigger", "biggest", "smaller", "smallest", "funnier", "funniest",
        "earlier", "earliest", "once", "twice", "anything", "something", "nothing", "everything",
        "anyone", "someone", "nobody", "everybody", "anywhere", "somewhere", "whatever",
        "whenever", "wherever", "whoever", "ourselves", "themselves", "myself", "yourself",
        "himself", "herself", "itself", "these", "those", "their", "theirs", "ours", "yours",
        "mine", "its", "whose", "which", "what", "when", "where", "why", "how", "who",
    ];

    let mut pool: Vec<String> = Vec::new();
    for n in NOUNS {
        pool.push(n.to_string());
        pool.push(format!("{n}s"));
    }
    for v in VERBS {
        pool.push(v.to_string());
        pool.push(format!("{v}s"));
        pool.push(format!("{v}ing"));
        pool.push(format!("{v}ed"));
    }
    for e in EXTRA {
        pool.push(e.to_string());
    }
    for a in ADJS {
        pool.push(a.to_string());
        pool.push(format!("{a}ly"));
    }
    for m in MISC {
        pool.push(m.to_string());
    }
    pool.sort();
    pool.dedup();
    pool
}
