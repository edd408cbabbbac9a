/// Lowercase whitespace tokenization with edge punctuation stripped.
/// Intra-word apostrophes survive ("let's" stays one token). An
/// all-punctuation input yields an empty list; downstream code treats
/// that as the out-of-scope fallback signal rather than an error.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let t = raw
                .trim_matches(|c: char| !c.is_alphanumeric())
                .to_lowercase();
            if t.is_empty() {
                None
            } else {
                Some(t)
            }
        })
        .collect()
}

/// Like [`tokenize`], but each token carries its `[start, end)` character
/// range in the original text (after edge-punctuation trimming).
pub fn tokenize_with_offsets(text: &str) -> Vec<(String, usize, usize)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let word_start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        let mut start = word_start;
        let mut end = i;
        while start < end && !chars[start].is_alphanumeric() {
            start += 1;
        }
        while end > start && !chars[end - 1].is_alphanumeric() {
            end -= 1;
        }
        if start < end {
            let token: String = chars[start..end].iter().collect::<String>().to_lowercase();
            out.push((token, start, end));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_and_lowercases() {
        assert_eq!(tokenize("Twenty four"), vec!["twenty", "four"]);
    }

    #[test]
    fn offsets_agree_with_tokenize() {
        for text in [
            "Bye bye Oscar",
            "let's count!",
            "  'six' flowers?  ",
            "?! ... --",
            "I planted Twenty two flowers.",
        ] {
            let with = tokenize_with_offsets(text);
            let plain = tokenize(text);
            assert_eq!(
                with.iter().map(|(t, _, _)| t.clone()).collect::<Vec<_>>(),
                plain
            );
            let chars: Vec<char> = text.chars().collect();
            for (tok, s, e) in &with {
                let slice: String = chars[*s..*e].iter().collect::<String>().to_lowercase();
                assert_eq!(&slice, tok);
            }
        }
    }

    #[test]
    fn table_style_utterance() {
        assert_eq!(tokenize("Bye bye Oscar"), vec!["bye", "bye", "oscar"]);
    }

    #[test]
    fn keeps_intra_word_apostrophe() {
        assert_eq!(tokenize("let's count!"), vec!["let's", "count"]);
    }

    #[test]
    fn all_punctuation_is_empty_not_error() {
        assert!(tokenize("?! ... --").is_empty());
    }

    #[test]
    fn strips_edge_quotes() {
        assert_eq!(tokenize("'six'"), vec!["six"]);
    }
}
