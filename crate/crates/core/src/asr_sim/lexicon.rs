use std::collections::BTreeMap;

/// Hand-built confusion lexicon of plausible misrecognitions for the
/// math-game vocabulary, weighted toward number words since those carry
/// the intent signal in this domain.
pub fn default_confusions() -> BTreeMap<String, Vec<String>> {
    let pairs: &[(&str, &[&str])] = &[
        ("one", &["won", "wand"]),
        ("two", &["to", "too"]),
        ("three", &["tree", "free"]),
        ("four", &["for", "floor"]),
        ("five", &["bye", "hive"]),
        ("six", &["snakes", "sticks"]),
        ("seven", &["I haven't", "heaven"]),
        ("eight", &["ate", "late"]),
        ("nine", &["nah", "mine"]),
        ("ten", &["tin", "then"]),
        ("eleven", &["a lemon", "levin"]),
        ("twelve", &["towel", "shelf"]),
        ("thirteen", &["sure thing", "thirty"]),
        ("fourteen", &["four t", "fortune"]),
        ("fifteen", &["fifty", "if teen"]),
        ("sixteen", &["sixty", "six t"]),
        ("seventeen", &["seventy", "several teen"]),
        ("eighteen", &["eighty", "a team"]),
        ("nineteen", &["my team", "ninety"]),
        ("twenty", &["plenty", "trailer"]),
        ("twenty two", &["tell me too", "plenty too"]),
        ("twenty eight", &["try it", "plenty late"]),
        ("thirty", &["dirty", "thursday"]),
        ("forty", &["naughty", "fort tea"]),
        ("fifty", &["shifty", "if tea"]),
        ("sixty", &["sticky", "six tea"]),
        ("seventy", &["suddenly", "seven tea"]),
        ("eighty", &["a tea", "matey"]),
        ("ninety", &["mighty", "nine tea"]),
        ("hundred", &["hundreds", "underst"]),
        ("count", &["can't", "town"]),
        ("counted", &["canton", "county"]),
        ("counting", &["county", "mounting"]),
        ("flower", &["flour", "lower"]),
        ("flowers", &["flour", "showers"]),
        ("sunflowers", &["7 flour", "some flowers"]),
        ("water", &["what are", "wader"]),
        ("plant", &["planet", "pant"]),
        ("pots", &["pods", "spots"]),
        ("pot", &["pod", "spot"]),
        ("yes", &["yeah", "guess"]),
        ("no", &["know", "snow"]),
        ("bye", &["buy", "by"]),
        ("oscar", &["a hamster", "oscars"]),
        ("done", &["down", "dawn"]),
        ("need", &["knee", "kneed"]),
        ("more", &["four", "bore"]),
        ("just", &["doesn't", "dust"]),
        ("we", &["he", "wheat"]),
        ("bloom", &["boom", "blue"]),
        ("grid", &["grade", "bread"]),
        ("number", &["lumber", "numb her"]),
        ("tens", &["tense", "dens"]),
        ("ones", &["once", "wands"]),
    ];
    pairs
        .iter()
        .map(|(w, alts)| {
            (
                (*w).to_string(),
                alts.iter().map(|a| (*a).to_string()).collect(),
            )
        })
        .collect()
}
