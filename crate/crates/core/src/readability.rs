//! Grade-level readability: Flesch-Kincaid, Coleman-Liau, ARI and their
//! mean.
//!
//! Syllables come from a vowel-group heuristic, so grades are comparable
//! between texts scored here but not with other tools.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{split_sentences, words};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ReadabilityError {
    #[error("text has no words")]
    DegenerateInput,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextStats {
    pub words: usize,
    pub sentences: usize,
    /// Alphabetic characters.
    pub letters: usize,
    /// Letters plus digits.
    pub characters: usize,
    pub syllables: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadabilityResult {
    pub fk: f64,
    pub cl: f64,
    pub ari: f64,
    pub composite: f64,
}

fn is_vowel(c: char) -> bool {
    matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Vowel groups (a, e, i, o, u, y), less one for a silent final `e`
/// after a consonant in words of three or more letters; never below 1.
pub fn count_syllables(word: &str) -> usize {
    let chars: Vec<char> = word.chars().collect();
    let mut groups: usize = 0;
    let mut prev_vowel = false;
    for &c in &chars {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    if let [.., before, last] = chars[..] {
        if chars.len() >= 3
            && last.eq_ignore_ascii_case(&'e')
            && before.is_alphabetic()
            && !is_vowel(before)
        {
            groups = groups.saturating_sub(1);
        }
    }
    groups.max(1)
}

pub fn text_stats(text: &str) -> TextStats {
    let mut s = TextStats::default();
    for w in words(text) {
        s.words += 1;
        s.syllables += count_syllables(w);
    }
    for c in text.chars() {
        if c.is_alphabetic() {
            s.letters += 1;
            s.characters += 1;
        } else if c.is_numeric() {
            s.characters += 1;
        }
    }
    if s.words > 0 {
        s.sentences = split_sentences(text).len().max(1);
    }
    s
}

fn nonempty(s: &TextStats) -> Result<(f64, f64), ReadabilityError> {
    if s.words == 0 {
        return Err(ReadabilityError::DegenerateInput);
    }
    Ok((s.words as f64, s.sentences.max(1) as f64))
}

/// `0.39 (words/sentences) + 11.8 (syllables/words) - 15.59`
pub fn flesch_kincaid(s: &TextStats) -> Result<f64, ReadabilityError> {
    let (w, sent) = nonempty(s)?;
    Ok(0.39 * (w / sent) + 11.8 * (s.syllables as f64 / w) - 15.59)
}

/// `0.0588 L - 0.296 S - 15.8`, with L letters and S sentences per 100 words.
pub fn coleman_liau(s: &TextStats) -> Result<f64, ReadabilityError> {
    let (w, sent) = nonempty(s)?;
    let l = s.letters as f64 / w * 100.0;
    let ss = sent / w * 100.0;
    Ok(0.0588 * l - 0.296 * ss - 15.8)
}

/// `4.71 (characters/words) + 0.5 (words/sentences) - 21.43`
pub fn ari(s: &TextStats) -> Result<f64, ReadabilityError> {
    let (w, sent) = nonempty(s)?;
    Ok(4.71 * (s.characters as f64 / w) + 0.5 * (w / sent) - 21.43)
}

pub fn readability_from_stats(s: &TextStats) -> Result<ReadabilityResult, ReadabilityError> {
    let fk = flesch_kincaid(s)?;
    let cl = coleman_liau(s)?;
    let ari = ari(s)?;
    Ok(ReadabilityResult {
        fk,
        cl,
        ari,
        composite: (fk + cl + ari) / 3.0,
    })
}

/// All three indices for `text` and their arithmetic mean.
pub fn composite_grade(text: &str) -> Result<ReadabilityResult, ReadabilityError> {
    readability_from_stats(&text_stats(text))
}
