//! Sentence-level lexicon sentiment.
//!
//! Each sentence scores the mean valence of its lexicon hits (0 with no
//! hits) and has magnitude `|score|`. A document's score is the mean of its
//! sentence scores and its magnitude the sum of sentence magnitudes, so
//! magnitude grows with length while score does not.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::text::split_sentences;
use crate::text::words;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LexiconError {
    #[error("line {line}: expected `word<TAB>valence`, got `{content}`")]
    MalformedLine { line: usize, content: String },
    #[error("line {line}: valence {valence} for `{word}` is outside [-1, 1]")]
    ValenceOutOfRange {
        line: usize,
        word: String,
        valence: f64,
    },
}

/// Lowercase word → valence in `[-1, 1]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    entries: BTreeMap<String, f64>,
}

const STARTER_LEXICON: &str = include_str!("../data/lexicon.tsv");

impl Lexicon {
    /// The bundled feedback-domain lexicon (about two hundred words).
    pub fn starter() -> Self {
        load_lexicon(STARTER_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn from_entries<I, S>(entries: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon::default();
        for (i, (word, valence)) in entries.into_iter().enumerate() {
            lex.insert(i + 1, word.as_ref(), valence)?;
        }
        Ok(lex)
    }

    fn insert(&mut self, line: usize, word: &str, valence: f64) -> Result<(), LexiconError> {
        if !(-1.0..=1.0).contains(&valence) {
            return Err(LexiconError::ValenceOutOfRange {
                line,
                word: word.to_string(),
                valence,
            });
        }
        self.entries.insert(word.to_lowercase(), valence);
        Ok(())
    }

    pub fn valence(&self, word: &str) -> Option<f64> {
        self.entries.get(&word.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Same words with every valence negated.
    pub fn negated(&self) -> Self {
        Lexicon {
            entries: self.entries.iter().map(|(w, v)| (w.clone(), -v)).collect(),
        }
    }

    pub fn to_tsv(&self) -> String {
        self.entries
            .iter()
            .map(|(w, v)| format!("{w}\t{v}\n"))
            .collect()
    }
}

/// Parse `word<TAB>valence` lines. Blank lines and `#` comments are
/// skipped; a repeated word keeps its last valence.
pub fn load_lexicon(source: &str) -> Result<Lexicon, LexiconError> {
    let mut lex = Lexicon::default();
    for (i, raw) in source.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        let malformed = || LexiconError::MalformedLine {
            line,
            content: trimmed.to_string(),
        };
        let (word, value) = trimmed.split_once('\t').ok_or_else(malformed)?;
        let word = word.trim();
        if word.is_empty() {
            return Err(malformed());
        }
        let valence: f64 = value.trim().parse().map_err(|_| malformed())?;
        lex.insert(line, word, valence)?;
    }
    Ok(lex)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentCategory {
    Encouraging,
    Informational,
    Critical,
}

/// Category cut points: `score >= encouraging` is encouraging,
/// `score <= critical` is critical, anything between is informational.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub encouraging: f64,
    pub critical: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            encouraging: 0.25,
            critical: -0.25,
        }
    }
}

impl Thresholds {
    pub fn categorize(&self, score: f64) -> SentimentCategory {
        if score >= self.encouraging {
            SentimentCategory::Encouraging
        } else if score <= self.critical {
            SentimentCategory::Critical
        } else {
            SentimentCategory::Informational
        }
    }
}

pub fn categorize(score: f64) -> SentimentCategory {
    Thresholds::default().categorize(score)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceSentiment {
    pub text: String,
    pub score: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentResult {
    pub score: f64,
    pub magnitude: f64,
    pub sentences: Vec<SentenceSentiment>,
    pub category: SentimentCategory,
}

fn score_sentence(sentence: &str, lexicon: &Lexicon) -> f64 {
    let (sum, hits) = words(sentence)
        .filter_map(|w| lexicon.valence(w))
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if hits == 0 {
        0.0
    } else {
        (sum / hits as f64).clamp(-1.0, 1.0)
    }
}

pub fn analyze_sentiment_with(text: &str, lexicon: &Lexicon, thresholds: Thresholds) -> SentimentResult {
    let sentences: Vec<SentenceSentiment> = split_sentences(text)
        .into_iter()
        .map(|s| {
            let score = score_sentence(&s, lexicon);
            SentenceSentiment {
                text: s,
                score,
                magnitude: score.abs(),
            }
        })
        .collect();
    let score = if sentences.is_empty() {
        0.0
    } else {
        sentences.iter().map(|s| s.score).sum::<f64>() / sentences.len() as f64
    };
    let magnitude = sentences.iter().map(|s| s.magnitude).sum();
    SentimentResult {
        score,
        magnitude,
        category: thresholds.categorize(score),
        sentences,
    }
}

pub fn analyze_sentiment(text: &str, lexicon: &Lexicon) -> SentimentResult {
    analyze_sentiment_with(text, lexicon, Thresholds::default())
}

/// Anything that produces a [`SentimentResult`] for a text. Remote
/// services plug in here with the same result shape.
pub trait SentimentAnalyzer: Send + Sync {
    fn analyze(&self, text: &str) -> SentimentResult;
}

#[derive(Debug, Clone, Default)]
pub struct LexiconAnalyzer {
    pub lexicon: Lexicon,
    pub thresholds: Thresholds,
}

impl LexiconAnalyzer {
    pub fn new(lexicon: Lexicon) -> Self {
        LexiconAnalyzer {
            lexicon,
            thresholds: Thresholds::default(),
        }
    }
}

impl SentimentAnalyzer for LexiconAnalyzer {
    fn analyze(&self, text: &str) -> SentimentResult {
        analyze_sentiment_with(text, &self.lexicon, self.thresholds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn good_bad() -> Lexicon {
        Lexicon::from_entries([("good", 0.8), ("bad", -0.8)]).unwrap()
    }

    #[test]
    fn single_positive_sentence() {
        let r = analyze_sentiment("This is good.", &good_bad());
        assert_eq!(r.score, 0.8);
        assert_eq!(r.magnitude, 0.8);
        assert_eq!(r.category, SentimentCategory::Encouraging);
        assert_eq!(r.sentences.len(), 1);
    }

    #[test]
    fn no_hits_is_neutral() {
        let r = analyze_sentiment("This is a sentence.", &good_bad());
        assert_eq!((r.score, r.magnitude), (0.0, 0.0));
        assert_eq!(r.category, SentimentCategory::Informational);
    }

    #[test]
    fn mixed_sentences_cancel_in_score_not_magnitude() {
        let r = analyze_sentiment("This is good. This is bad.", &good_bad());
        assert_eq!(r.score, 0.0);
        assert!((r.magnitude - 1.6).abs() < 1e-12);
        assert_eq!(r.category, SentimentCategory::Informational);
    }

    #[test]
    fn empty_text() {
        let r = analyze_sentiment("", &good_bad());
        assert!(r.sentences.is_empty());
        assert_eq!((r.score, r.magnitude), (0.0, 0.0));
    }

    #[test]
    fn sentence_score_is_mean_of_hits() {
        let lex = Lexicon::from_entries([("good", 0.8), ("bad", -0.8), ("great", 0.6)]).unwrap();
        let r = analyze_sentiment("Good and great but BAD!", &lex);
        assert!((r.score - (0.8 + 0.6 - 0.8) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn category_breakpoints() {
        assert_eq!(categorize(0.0), SentimentCategory::Informational);
        assert_eq!(categorize(0.25), SentimentCategory::Encouraging);
        assert_eq!(categorize(0.2499), SentimentCategory::Informational);
        assert_eq!(categorize(-0.25), SentimentCategory::Critical);
        assert_eq!(categorize(-0.3), SentimentCategory::Critical);
        assert_eq!(categorize(-0.2499), SentimentCategory::Informational);
        assert_eq!(categorize(1.0), SentimentCategory::Encouraging);
        assert_eq!(categorize(-1.0), SentimentCategory::Critical);
    }

    #[test]
    fn lexicon_file_format() {
        let lex = load_lexicon("good\t0.8").unwrap();
        assert_eq!(lex.valence("good"), Some(0.8));
        assert_eq!(lex.valence("GOOD"), Some(0.8));

        assert!(matches!(
            load_lexicon("good\t2.0"),
            Err(LexiconError::ValenceOutOfRange { line: 1, .. })
        ));
        assert!(matches!(
            load_lexicon("good 0.8"),
            Err(LexiconError::MalformedLine { line: 1, .. })
        ));
        assert!(matches!(
            load_lexicon("# c\n\ngood\tnope"),
            Err(LexiconError::MalformedLine { line: 3, .. })
        ));

        let lex = load_lexicon("Good\t0.8\ngood\t0.1\n").unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.valence("good"), Some(0.1));
        assert_eq!(load_lexicon(&lex.to_tsv()).unwrap(), lex);
    }

    #[test]
    fn starter_lexicon_loads() {
        let lex = Lexicon::starter();
        assert!(lex.len() >= 200);
        assert!(lex.valence("excellent").unwrap() > 0.0);
        assert!(lex.valence("vague").unwrap() < 0.0);
    }

    #[test]
    fn negated_lexicon_flips_scores() {
        let lex = Lexicon::starter();
        let text = "The argument is clear and compelling. Some claims are vague. Nice!";
        let a = analyze_sentiment(text, &lex);
        let b = analyze_sentiment(text, &lex.negated());
        for (x, y) in a.sentences.iter().zip(&b.sentences) {
            assert_eq!(x.score, -y.score);
        }
    }
}
