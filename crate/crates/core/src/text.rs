//! Word and sentence tokenization shared by the corpus, sentiment and
//! readability modules.
//!
//! A word is a maximal run of alphanumeric characters. Apostrophes and
//! hyphens are kept when they sit between two alphanumerics, so
//! `well-formed` and `isn't` are single words while `--` or a trailing `'`
//! break a word.

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-' | '\u{2010}' | '\u{2011}')
}

/// Iterator over the words of a text, as borrowed slices.
pub struct Words<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Iterator for Words<'a> {
    type Item = &'a str;

    fn next(&mut self) -> Option<&'a str> {
        let rest = &self.text[self.pos..];
        let (start_rel, _) = rest.char_indices().find(|(_, c)| c.is_alphanumeric())?;
        let start = self.pos + start_rel;

        let mut end = start;
        let mut chars = self.text[start..].char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            if c.is_alphanumeric() {
                end = start + i + c.len_utf8();
            } else if is_joiner(c)
                && chars.peek().is_some_and(|(_, next)| next.is_alphanumeric())
            {
                continue;
            } else {
                break;
            }
        }
        self.pos = end;
        Some(&self.text[start..end])
    }
}

pub fn words(text: &str) -> Words<'_> {
    Words { text, pos: 0 }
}

/// Number of words in `text` under the tokenization described above.
pub fn count_words(text: &str) -> usize {
    words(text).count()
}

/// Split after `.`, `!` or `?` when followed by whitespace or end of text.
///
/// Fragments are trimmed and empty ones dropped. Abbreviations such as
/// `e.g.` are split like any other terminator.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if matches!(c, '.' | '!' | '?') {
            let boundary = match iter.peek() {
                None => true,
                Some((_, next)) => next.is_whitespace(),
            };
            if boundary {
                let end = i + c.len_utf8();
                push_trimmed(&mut out, &text[start..end]);
                start = end;
            }
        }
    }
    push_trimmed(&mut out, &text[start..]);
    out
}

fn push_trimmed(out: &mut Vec<String>, fragment: &str) {
    let t = fragment.trim();
    if !t.is_empty() {
        out.push(t.to_string());
    }
}
