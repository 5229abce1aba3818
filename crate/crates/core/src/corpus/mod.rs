//! Works, rubrics and review maps: the data every other module consumes.

mod review;
mod rubric;
mod work;

use serde::{Deserialize, Serialize};

pub use crate::text::count_words;
pub use review::{
    is_annotation_code, validate_review_map, Anchor, CriterionEntry, Edge, Node, NodeBody,
    ReviewKind, ReviewMap, Violation, ANNOTATION_CODE_EXAMPLES,
};
pub use rubric::{default_rubric, parse_rubric, Criterion, ReportingElement, Rubric, RubricError};
pub use work::{parse_work, Section, Work, WorkError, PREAMBLE_HEADING};

/// Works, the reviews written about them, and the rubric they were reviewed
/// against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewCorpus {
    pub works: Vec<Work>,
    pub reviews: Vec<ReviewMap>,
    pub rubric: Rubric,
}

impl ReviewCorpus {
    pub fn work(&self, id: &str) -> Option<&Work> {
        self.works.iter().find(|w| w.id == id)
    }

    pub fn reviews_of_kind(&self, kind: ReviewKind) -> impl Iterator<Item = &ReviewMap> {
        self.reviews.iter().filter(move |r| r.kind == kind)
    }

    /// Violations per review id, for reviews that have any.
    pub fn violations(&self) -> Vec<(String, Vec<Violation>)> {
        self.reviews
            .iter()
            .filter_map(|r| {
                let v = match self.work(&r.work_id) {
                    Some(w) => validate_review_map(r, w, &self.rubric),
                    None => vec![Violation::UnknownWork {
                        work_id: r.work_id.clone(),
                    }],
                };
                (!v.is_empty()).then(|| (r.id.clone(), v))
            })
            .collect()
    }
}
