//! Low-level text primitives: tokenization, sentence counting, a syllable
//! heuristic and lexicon-based polarity. Everything here is pure and
//! reentrant; a loaded lexicon is immutable.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TextError {
    #[error("text is empty or whitespace-only")]
    EmptyText,
    #[error("not a non-empty alphabetic word: {0:?}")]
    InvalidWord(String),
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: expected `token<TAB>score`, got {content:?}")]
    Malformed { line: usize, content: String },
    #[error("line {line}: cannot parse score {value:?}")]
    BadScore { line: usize, value: String },
    #[error("line {line}: score {value} outside [-1, 1]")]
    ScoreOutOfRange { line: usize, value: f64 },
    #[error("line {line}: duplicate entry for {token:?}")]
    DuplicateEntry { line: usize, token: String },
    #[error("negator {token:?} also has a polarity score")]
    NegatorOverlap { token: String },
    #[error("lexicon has no scored entries")]
    Empty,
}

/// A lowercased, purely alphabetic token with the character offset of its
/// first letter in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub char_offset: usize,
}

/// Word polarity scores plus the tokens that flip the sign of the word
/// that follows them. Scores are always within [-1, 1] and negators never
/// carry a score of their own.
#[derive(Debug, Clone)]
pub struct PolarityLexicon {
    entries: BTreeMap<String, f64>,
    negators: BTreeSet<String>,
}

impl PolarityLexicon {
    pub fn new(
        entries: BTreeMap<String, f64>,
        negators: BTreeSet<String>,
    ) -> Result<Self, LexiconError> {
        for (token, &score) in &entries {
            if !(-1.0..=1.0).contains(&score) {
                return Err(LexiconError::ScoreOutOfRange {
                    line: 0,
                    value: score,
                });
            }
            if negators.contains(token) {
                return Err(LexiconError::NegatorOverlap {
                    token: token.clone(),
                });
            }
        }
        Ok(Self { entries, negators })
    }

    /// Parse the lexicon file format: `token<TAB>score` lines, `#` comments,
    /// and an optional trailing negator section introduced by a `#NEGATORS`
    /// line with one token per line after it.
    pub fn parse(input: &str) -> Result<Self, LexiconError> {
        let mut entries = BTreeMap::new();
        let mut negators = BTreeSet::new();
        let mut in_negators = false;

        for (idx, raw) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if line == "#NEGATORS" {
                in_negators = true;
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            if in_negators {
                negators.insert(line.to_lowercase());
                continue;
            }
            let (token, score) = line.split_once('\t').ok_or_else(|| LexiconError::Malformed {
                line: line_no,
                content: line.to_string(),
            })?;
            let token = token.trim().to_lowercase();
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|_| LexiconError::BadScore {
                    line: line_no,
                    value: score.trim().to_string(),
                })?;
            if !(-1.0..=1.0).contains(&score) {
                return Err(LexiconError::ScoreOutOfRange {
                    line: line_no,
                    value: score,
                });
            }
            if entries.insert(token.clone(), score).is_some() {
                return Err(LexiconError::DuplicateEntry {
                    line: line_no,
                    token,
                });
            }
        }

        if entries.is_empty() {
            return Err(LexiconError::Empty);
        }
        for token in &negators {
            if entries.contains_key(token) {
                return Err(LexiconError::NegatorOverlap {
                    token: token.clone(),
                });
            }
        }
        Ok(Self { entries, negators })
    }

    pub fn score(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied()
    }

    pub fn is_negator(&self, token: &str) -> bool {
        self.negators.contains(token)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Split maximal runs of Unicode letters into lowercased tokens. Digits,
/// punctuation and whitespace all act as separators.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut start = 0usize;

    for (offset, ch) in text.chars().enumerate() {
        if ch.is_alphabetic() {
            if current.is_empty() {
                start = offset;
            }
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(Token {
                surface: std::mem::take(&mut current),
                char_offset: start,
            });
        }
    }
    if !current.is_empty() {
        tokens.push(Token {
            surface: current,
            char_offset: start,
        });
    }
    tokens
}

/// Count sentences: a sentence ends at `.`, `!` or `?` followed by
/// whitespace or end-of-text, and segments containing no letters do not
/// count. A terminator-free text is one sentence, so the result is >= 1.
pub fn split_sentences(text: &str) -> Result<usize, TextError> {
    if text.trim().is_empty() {
        return Err(TextError::EmptyText);
    }

    let chars: Vec<char> = text.chars().collect();
    let mut count = 0usize;
    let mut segment_has_letter = false;

    for (i, &ch) in chars.iter().enumerate() {
        if matches!(ch, '.' | '!' | '?') {
            let next_is_boundary = chars
                .get(i + 1)
                .map_or(true, |next| next.is_whitespace());
            if next_is_boundary {
                if segment_has_letter {
                    count += 1;
                }
                segment_has_letter = false;
                continue;
            }
        }
        if ch.is_alphabetic() {
            segment_has_letter = true;
        }
    }
    if segment_has_letter {
        count += 1;
    }
    Ok(count.max(1))
}

const VOWELS: [char; 6] = ['a', 'e', 'i', 'o', 'u', 'y'];

fn is_vowel(ch: char) -> bool {
    VOWELS.contains(&ch)
}

/// Heuristic syllable count: the number of maximal vowel groups
/// (a, e, i, o, u, y), minus one for a silent final `e` (but not `le`)
/// in words longer than two letters with at least two groups. Never
/// returns less than 1.
pub fn count_syllables(word: &str) -> Result<usize, TextError> {
    if word.is_empty() || !word.chars().all(char::is_alphabetic) {
        return Err(TextError::InvalidWord(word.to_string()));
    }
    let lower: Vec<char> = word.to_lowercase().chars().collect();

    let mut groups = 0usize;
    let mut in_group = false;
    for &ch in &lower {
        if is_vowel(ch) {
            if !in_group {
                groups += 1;
            }
            in_group = true;
        } else {
            in_group = false;
        }
    }

    let ends_in_e = lower.last() == Some(&'e');
    let ends_in_le = lower.len() >= 2 && lower[lower.len() - 2..] == ['l', 'e'];
    if ends_in_e && !ends_in_le && lower.len() > 2 && groups >= 2 {
        groups -= 1;
    }
    Ok(groups.max(1))
}

/// Mean polarity of the tokens that match the lexicon; a match directly
/// preceded by a negator contributes its score sign-flipped. No matches
/// yield 0.0, so the result is always within [-1, 1].
pub fn polarity(tokens: &[Token], lexicon: &PolarityLexicon) -> f64 {
    let mut sum = 0.0;
    let mut matched = 0usize;

    for (i, token) in tokens.iter().enumerate() {
        if let Some(score) = lexicon.score(&token.surface) {
            let negated = i
                .checked_sub(1)
                .map_or(false, |p| lexicon.is_negator(&tokens[p].surface));
            sum += if negated { -score } else { score };
            matched += 1;
        }
    }
    if matched == 0 {
        0.0
    } else {
        sum / matched as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn tokenize_headline() {
        let tokens = tokenize("3 Reasons Simple Isnt");
        assert_eq!(surfaces(&tokens), ["reasons", "simple", "isnt"]);
    }

    #[test]
    fn tokenize_empty() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn tokenize_separators() {
        assert_eq!(surfaces(&tokenize("GDP-growth 2021")), ["gdp", "growth"]);
    }

    #[test]
    fn tokenize_offsets() {
        let tokens = tokenize("ab 12cd");
        assert_eq!(tokens[0].char_offset, 0);
        assert_eq!(tokens[1].char_offset, 5);
    }

    #[test]
    fn sentences_two_terminators() {
        assert_eq!(split_sentences("Go now. It works!").unwrap(), 2);
    }

    #[test]
    fn sentences_terminator_free() {
        assert_eq!(split_sentences("no terminator here").unwrap(), 1);
    }

    #[test]
    fn sentences_letterless_segment_not_counted() {
        assert_eq!(split_sentences("Hi. ... Bye.").unwrap(), 2);
    }

    #[test]
    fn sentences_empty_is_error() {
        assert_eq!(split_sentences(""), Err(TextError::EmptyText));
        assert_eq!(split_sentences("   \t"), Err(TextError::EmptyText));
    }

    #[test]
    fn sentences_letterless_text_floors_to_one() {
        assert_eq!(split_sentences("123 456.").unwrap(), 1);
    }

    // Expected counts below are dictionary counts, not heuristic outputs.
    #[test]
    fn syllables_examples() {
        assert_eq!(count_syllables("cat").unwrap(), 1);
        assert_eq!(count_syllables("make").unwrap(), 1);
        assert_eq!(count_syllables("beautiful").unwrap(), 3);
        assert_eq!(count_syllables("table").unwrap(), 2);
    }

    #[test]
    fn syllables_rejects_bad_input() {
        assert!(count_syllables("").is_err());
        assert!(count_syllables("ab3").is_err());
        assert!(count_syllables("a b").is_err());
    }

    #[test]
    fn syllables_short_words_keep_final_e() {
        // length <= 2 never triggers the silent-e subtraction
        assert_eq!(count_syllables("be").unwrap(), 1);
    }

    fn tiny_lexicon() -> PolarityLexicon {
        PolarityLexicon::parse("good\t0.7\nbad\t-0.6\n#NEGATORS\nnot\n").unwrap()
    }

    #[test]
    fn polarity_no_match_is_zero() {
        let lex = tiny_lexicon();
        assert_eq!(polarity(&tokenize("nothing matches here"), &lex), 0.0);
    }

    #[test]
    fn polarity_single_match() {
        let lex = tiny_lexicon();
        assert!((polarity(&tokenize("good"), &lex) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn polarity_negation_flips_sign() {
        let lex = tiny_lexicon();
        assert!((polarity(&tokenize("not good"), &lex) + 0.7).abs() < 1e-12);
    }

    #[test]
    fn polarity_mean_of_matches() {
        let lex = tiny_lexicon();
        // (0.7 + -0.6) / 2
        let p = polarity(&tokenize("good plan bad idea"), &lex);
        assert!((p - 0.05).abs() < 1e-12);
    }

    #[test]
    fn lexicon_parses_comments_and_negators() {
        let lex = PolarityLexicon::parse(
            "# comment\ngood\t0.7\n\nBAD\t-0.5\n#NEGATORS\nnot\nnever\n",
        )
        .unwrap();
        assert_eq!(lex.len(), 2);
        assert_eq!(lex.score("bad"), Some(-0.5));
        assert!(lex.is_negator("never"));
    }

    #[test]
    fn lexicon_rejects_out_of_range_score() {
        assert!(matches!(
            PolarityLexicon::parse("huge\t1.5\n"),
            Err(LexiconError::ScoreOutOfRange { .. })
        ));
    }

    #[test]
    fn lexicon_rejects_negator_overlap() {
        assert!(matches!(
            PolarityLexicon::parse("not\t-0.1\n#NEGATORS\nnot\n"),
            Err(LexiconError::NegatorOverlap { .. })
        ));
    }

    #[test]
    fn lexicon_rejects_malformed_line() {
        assert!(matches!(
            PolarityLexicon::parse("good 0.7\n"),
            Err(LexiconError::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn lexicon_rejects_duplicates() {
        assert!(matches!(
            PolarityLexicon::parse("good\t0.7\ngood\t0.2\n"),
            Err(LexiconError::DuplicateEntry { line: 2, .. })
        ));
    }
}
