use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::rubric::Rubric;
use super::work::Work;

/// Annotation codes shipped with the default rubric, one positive and one
/// negative per tag.
pub const ANNOTATION_CODE_EXAMPLES: [&str; 12] = [
    "EXP+", "EXP-", "CON+", "CON-", "ANA+", "ANA-", "APP+", "APP-", "STR+", "STR-", "COM+",
    "COM-",
];

/// True when `code` matches `[A-Z]{2,4}[+-]`.
pub fn is_annotation_code(code: &str) -> bool {
    let Some(body) = code.strip_suffix(['+', '-']) else {
        return false;
    };
    (2..=4).contains(&body.len()) && body.bytes().all(|b| b.is_ascii_uppercase())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReviewKind {
    Peer,
    Ai,
    #[serde(rename = "self")]
    SelfReview,
    Instructor,
}

impl fmt::Display for ReviewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReviewKind::Peer => "peer",
            ReviewKind::Ai => "ai",
            ReviewKind::SelfReview => "self",
            ReviewKind::Instructor => "instructor",
        })
    }
}

/// A highlighted span of one section, in chars of [`Section::text`].
///
/// [`Section::text`]: super::work::Section::text
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anchor {
    pub section_index: usize,
    pub start_char: usize,
    pub end_char: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum NodeBody {
    Criterion {
        criterion_code: String,
        rating: Option<u8>,
        narrative: String,
    },
    Annotation {
        code: String,
        anchor: Anchor,
        comment: String,
    },
    Comment {
        text: String,
    },
    Overall {
        narrative: String,
        rating: Option<u8>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    #[serde(flatten)]
    pub body: NodeBody,
}

impl Node {
    pub fn text(&self) -> &str {
        match &self.body {
            NodeBody::Criterion { narrative, .. } | NodeBody::Overall { narrative, .. } => narrative,
            NodeBody::Annotation { comment, .. } => comment,
            NodeBody::Comment { text } => text,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
}

/// A review as a concept map of criterion, annotation and comment nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewMap {
    pub id: String,
    pub work_id: String,
    pub rubric_id: String,
    pub kind: ReviewKind,
    pub reviewer_alias: String,
    pub nodes: Vec<Node>,
    #[serde(default)]
    pub edges: Vec<Edge>,
}

/// A criterion node viewed through its fields.
#[derive(Debug, Clone, Copy)]
pub struct CriterionEntry<'a> {
    pub code: &'a str,
    pub rating: Option<u8>,
    pub narrative: &'a str,
}

impl ReviewMap {
    pub fn criterion_entries(&self) -> impl Iterator<Item = CriterionEntry<'_>> {
        self.nodes.iter().filter_map(|n| match &n.body {
            NodeBody::Criterion {
                criterion_code,
                rating,
                narrative,
            } => Some(CriterionEntry {
                code: criterion_code,
                rating: *rating,
                narrative,
            }),
            _ => None,
        })
    }

    /// All node texts joined by blank lines, in node order.
    pub fn full_text(&self) -> String {
        self.nodes
            .iter()
            .map(Node::text)
            .filter(|t| !t.trim().is_empty())
            .collect::<Vec<_>>()
            .join("\n\n")
    }

    pub fn word_count(&self) -> usize {
        self.nodes.iter().map(|n| crate::text::count_words(n.text())).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("review map serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    UnknownWork { work_id: String },
    WorkMismatch { expected: String, found: String },
    RubricMismatch { expected: String, found: String },
    DuplicateNodeId { node: String },
    DanglingEdge { from: String, to: String },
    SelfLoop { node: String },
    DuplicateCriterionNode { code: String },
    UnknownCriterion { node: String, code: String },
    RatingOutOfRange { node: String, rating: u8 },
    InvalidAnnotationCode { node: String, code: String },
    AnchorOutOfBounds { node: String, anchor: Anchor },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownWork { work_id } => write!(f, "review references unknown work `{work_id}`"),
            Violation::WorkMismatch { expected, found } => {
                write!(f, "review is for work `{found}`, checked against `{expected}`")
            }
            Violation::RubricMismatch { expected, found } => {
                write!(f, "review uses rubric `{found}`, expected `{expected}`")
            }
            Violation::DuplicateNodeId { node } => write!(f, "node id `{node}` is not unique"),
            Violation::DanglingEdge { from, to } => {
                write!(f, "edge {from} -> {to} references a missing node")
            }
            Violation::SelfLoop { node } => write!(f, "edge loops on node `{node}`"),
            Violation::DuplicateCriterionNode { code } => {
                write!(f, "criterion `{code}` has more than one node")
            }
            Violation::UnknownCriterion { node, code } => {
                write!(f, "node `{node}` references unknown criterion `{code}`")
            }
            Violation::RatingOutOfRange { node, rating } => {
                write!(f, "node `{node}` has rating {rating} outside 1..=5")
            }
            Violation::InvalidAnnotationCode { node, code } => {
                write!(f, "node `{node}` has malformed annotation code `{code}`")
            }
            Violation::AnchorOutOfBounds { node, anchor } => write!(
                f,
                "node `{node}` anchors section {} chars {}..{} outside the work",
                anchor.section_index, anchor.start_char, anchor.end_char
            ),
        }
    }
}

/// Every invariant the map breaks against `work` and `rubric`; empty when
/// the map is well formed.
pub fn validate_review_map(map: &ReviewMap, work: &Work, rubric: &Rubric) -> Vec<Violation> {
    let mut out = Vec::new();
    if map.work_id != work.id {
        out.push(Violation::WorkMismatch {
            expected: work.id.clone(),
            found: map.work_id.clone(),
        });
    }
    if map.rubric_id != rubric.id {
        out.push(Violation::RubricMismatch {
            expected: rubric.id.clone(),
            found: map.rubric_id.clone(),
        });
    }

    let mut ids = HashSet::new();
    for n in &map.nodes {
        if !ids.insert(n.id.as_str()) {
            out.push(Violation::DuplicateNodeId { node: n.id.clone() });
        }
    }
    for e in &map.edges {
        if !ids.contains(e.from.as_str()) || !ids.contains(e.to.as_str()) {
            out.push(Violation::DanglingEdge {
                from: e.from.clone(),
                to: e.to.clone(),
            });
        } else if e.from == e.to {
            out.push(Violation::SelfLoop { node: e.from.clone() });
        }
    }

    let mut criteria_seen = HashSet::new();
    for n in &map.nodes {
        match &n.body {
            NodeBody::Criterion {
                criterion_code,
                rating,
                ..
            } => {
                if rubric.criterion(criterion_code).is_none() {
                    out.push(Violation::UnknownCriterion {
                        node: n.id.clone(),
                        code: criterion_code.clone(),
                    });
                }
                if !criteria_seen.insert(criterion_code.as_str()) {
                    out.push(Violation::DuplicateCriterionNode {
                        code: criterion_code.clone(),
                    });
                }
                check_rating(&mut out, &n.id, *rating);
            }
            NodeBody::Overall { rating, .. } => check_rating(&mut out, &n.id, *rating),
            NodeBody::Annotation { code, anchor, .. } => {
                if !is_annotation_code(code) {
                    out.push(Violation::InvalidAnnotationCode {
                        node: n.id.clone(),
                        code: code.clone(),
                    });
                }
                let in_bounds = work
                    .sections
                    .get(anchor.section_index)
                    .is_some_and(|s| anchor.start_char < anchor.end_char && anchor.end_char <= s.char_len());
                if !in_bounds {
                    out.push(Violation::AnchorOutOfBounds {
                        node: n.id.clone(),
                        anchor: *anchor,
                    });
                }
            }
            NodeBody::Comment { .. } => {}
        }
    }
    out
}

fn check_rating(out: &mut Vec<Violation>, node: &str, rating: Option<u8>) {
    if let Some(r) = rating.filter(|r| !(1..=5).contains(r)) {
        out.push(Violation::RatingOutOfRange {
            node: node.to_string(),
            rating: r,
        });
    }
}
