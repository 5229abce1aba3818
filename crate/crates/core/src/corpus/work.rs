use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::text::count_words;

pub const PREAMBLE_HEADING: &str = "Preamble";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WorkError {
    #[error("document has no content")]
    EmptyDocument,
    #[error("front matter opened with `---` is never closed")]
    UnterminatedFrontMatter,
    #[error("front matter line {line} is not `key: value`")]
    MalformedFrontMatter { line: usize },
    #[error("section {index}: {reason}")]
    InvalidSection { index: usize, reason: String },
}

/// A structured student text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Work {
    pub id: String,
    pub title: String,
    pub author_alias: String,
    /// Course or cohort label used to group corpus summaries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub course: Option<String>,
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub level: u8,
    pub heading: String,
    pub paragraphs: Vec<String>,
}

impl Section {
    /// Paragraphs joined by blank lines. Anchor offsets index into this
    /// string, counted in chars.
    pub fn text(&self) -> String {
        self.paragraphs.join("\n\n")
    }

    pub fn char_len(&self) -> usize {
        let joins = self.paragraphs.len().saturating_sub(1) * 2;
        self.paragraphs.iter().map(|p| p.chars().count()).sum::<usize>() + joins
    }

    pub fn word_count(&self) -> usize {
        self.paragraphs.iter().map(|p| count_words(p)).sum()
    }
}

impl Work {
    pub fn word_count(&self) -> usize {
        self.sections.iter().map(Section::word_count).sum()
    }

    /// Heading and body of every section, in document order.
    pub fn full_text(&self) -> String {
        self.sections
            .iter()
            .map(|s| {
                if s.paragraphs.is_empty() {
                    s.heading.clone()
                } else {
                    format!("{}\n\n{}", s.heading, s.text())
                }
            })
            .collect::<Vec<_>>()
            .join("\n\n")
    }

    pub fn validate(&self) -> Result<(), WorkError> {
        if self.sections.is_empty() {
            return Err(WorkError::EmptyDocument);
        }
        for (index, s) in self.sections.iter().enumerate() {
            let bad = |reason: &str| WorkError::InvalidSection {
                index,
                reason: reason.to_string(),
            };
            if !(1..=6).contains(&s.level) {
                return Err(bad("heading level must be 1..=6"));
            }
            if s.heading.contains('\n') {
                return Err(bad("heading spans several lines"));
            }
            for p in &s.paragraphs {
                if p.is_empty() || p.trim() != p {
                    return Err(bad("paragraph is empty or has surrounding whitespace"));
                }
                if p.lines().any(|l| l.trim().is_empty()) {
                    return Err(bad("paragraph contains a blank line"));
                }
            }
        }
        Ok(())
    }

    /// Serialize to the heading-based markup accepted by [`parse_work`].
    pub fn to_markup(&self) -> String {
        let mut out = String::from("---\n");
        out.push_str(&format!("id: {}\n", self.id));
        out.push_str(&format!("title: {}\n", self.title));
        out.push_str(&format!("author: {}\n", self.author_alias));
        if let Some(course) = &self.course {
            out.push_str(&format!("course: {course}\n"));
        }
        out.push_str("---\n");
        for s in &self.sections {
            out.push('\n');
            out.push_str(&"#".repeat(s.level as usize));
            if !s.heading.is_empty() {
                out.push(' ');
                out.push_str(&s.heading);
            }
            out.push('\n');
            for p in &s.paragraphs {
                out.push('\n');
                for line in p.lines() {
                    if heading_line(line).is_some() || line.starts_with('\\') {
                        out.push('\\');
                    }
                    out.push_str(line);
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// `Some((level, heading))` when the line opens a section.
fn heading_line(line: &str) -> Option<(u8, &str)> {
    let hashes = line.bytes().take_while(|&b| b == b'#').count();
    if hashes == 0 || hashes > 6 {
        return None;
    }
    let rest = &line[hashes..];
    if rest.is_empty() || rest.starts_with([' ', '\t']) {
        Some((hashes as u8, rest.trim()))
    } else {
        None
    }
}

#[derive(Default)]
struct FrontMatter {
    id: Option<String>,
    title: Option<String>,
    author: Option<String>,
    course: Option<String>,
}

/// Split an optional leading `---` block off the source.
fn front_matter(source: &str) -> Result<(FrontMatter, &str), WorkError> {
    let mut fm = FrontMatter::default();
    let trimmed = source.trim_start_matches(['\n', '\r', ' ', '\t']);
    let mut lines = trimmed.split_inclusive('\n');
    match lines.next() {
        Some(first) if first.trim_end() == "---" => {}
        _ => return Ok((fm, source)),
    }
    let mut consumed = source.len() - trimmed.len() + trimmed.find('\n').map_or(trimmed.len(), |i| i + 1);
    for (n, line) in lines.enumerate() {
        consumed += line.len();
        let line = line.trim_end();
        if line == "---" {
            return Ok((fm, &source[consumed..]));
        }
        if line.trim().is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or(WorkError::MalformedFrontMatter { line: n + 2 })?;
        let value = value.trim().to_string();
        match key.trim() {
            "id" => fm.id = Some(value),
            "title" => fm.title = Some(value),
            "author" => fm.author = Some(value),
            "course" => fm.course = Some(value).filter(|v| !v.is_empty()),
            _ => {}
        }
    }
    Err(WorkError::UnterminatedFrontMatter)
}

/// Parse heading-based markup into a [`Work`].
///
/// Lines opening with one to six `#` characters followed by a space start a
/// section of that depth. Paragraphs are separated by blank lines. Body
/// text before the first heading lands in a level-1 "Preamble" section.
/// One leading `\` is dropped from body lines that stay non-blank, so
/// `\# not a heading` stays in the paragraph.
/// An optional `---` front-matter block supplies `id`, `title`, `author`
/// and `course`; a missing id is derived from the body's SHA-256.
pub fn parse_work(source: &str) -> Result<Work, WorkError> {
    if source.trim().is_empty() {
        return Err(WorkError::EmptyDocument);
    }
    let (fm, body) = front_matter(source)?;

    let mut sections: Vec<Section> = Vec::new();
    let mut current: Option<Section> = None;
    let mut para: Vec<&str> = Vec::new();

    fn flush(para: &mut Vec<&str>, current: &mut Option<Section>) {
        if para.is_empty() {
            return;
        }
        let text = para.join("\n");
        para.clear();
        let text = text.trim();
        if text.is_empty() {
            return;
        }
        current
            .get_or_insert_with(|| Section {
                level: 1,
                heading: PREAMBLE_HEADING.to_string(),
                paragraphs: Vec::new(),
            })
            .paragraphs
            .push(text.to_string());
    }

    for raw in body.lines() {
        let line = raw.trim_end_matches('\r');
        if let Some((level, heading)) = heading_line(line) {
            flush(&mut para, &mut current);
            if let Some(done) = current.take() {
                sections.push(done);
            }
            current = Some(Section {
                level,
                heading: heading.to_string(),
                paragraphs: Vec::new(),
            });
        } else if line.trim().is_empty() {
            flush(&mut para, &mut current);
        } else {
            // A leading backslash escapes a body line that would otherwise
            // read as a heading.
            let unescaped = line.strip_prefix('\\').filter(|rest| !rest.trim().is_empty());
            para.push(unescaped.unwrap_or(line));
        }
    }
    flush(&mut para, &mut current);
    sections.extend(current);

    if sections.is_empty() {
        return Err(WorkError::EmptyDocument);
    }

    let id = fm.id.filter(|s| !s.is_empty()).unwrap_or_else(|| {
        let digest = Sha256::digest(body.trim().as_bytes());
        format!("w-{}", &hex::encode(digest)[..12])
    });
    let title = fm.title.unwrap_or_else(|| {
        sections
            .iter()
            .find(|s| s.heading != PREAMBLE_HEADING && !s.heading.is_empty())
            .map(|s| s.heading.clone())
            .unwrap_or_else(|| "Untitled".to_string())
    });

    Ok(Work {
        id,
        title,
        author_alias: fm.author.unwrap_or_default(),
        course: fm.course,
        sections,
    })
}
