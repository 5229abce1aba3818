//! Seeded synthetic corpora for demos and tests. Everything here is
//! deterministic in the seed.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    Anchor, Edge, Node, NodeBody, ReviewCorpus, ReviewKind, ReviewMap, Rubric, Section, Work,
    ANNOTATION_CODE_EXAMPLES,
};
use crate::llm::CompletionBackend;
use crate::pipeline::{generate_ai_review, PipelineConfig, PipelineError};

const HEADINGS: &[&str] = &[
    "Introduction",
    "Background",
    "Literature Review",
    "Theoretical Framework",
    "Method",
    "Case Description",
    "Analysis",
    "Discussion",
    "Implications for Practice",
    "Conclusion",
];

const SUBJECTS: &[&str] = &[
    "Collaborative learning",
    "Formative assessment",
    "The learning community",
    "Peer feedback",
    "Multimodal composition",
    "The curriculum design",
    "Student agency",
    "Classroom discourse",
    "Digital annotation",
    "The reflective journal",
];

const VERBS: &[&str] = &[
    "shapes",
    "supports",
    "complicates",
    "extends",
    "reframes",
    "depends on",
    "challenges",
    "illustrates",
];

const OBJECTS: &[&str] = &[
    "how novices build disciplinary knowledge",
    "the transfer of skills between settings",
    "the way teachers sequence tasks",
    "students' sense of ownership over their writing",
    "the balance between structure and open inquiry",
    "equitable participation in group work",
    "the role of prior experience in new learning",
    "the link between theory and classroom practice",
];

const CLOSERS: &[&str] = &[
    "in the cases examined here",
    "according to recent studies",
    "when feedback arrives early",
    "across several school contexts",
    "in ways that are easy to overlook",
    "for learners from diverse backgrounds",
];

const PRAISE: &[&str] = &[
    "This section is clear and well organized.",
    "I really liked how you connected the example to your own teaching.",
    "Your use of sources is thoughtful and convincing.",
    "Great job explaining the key terms.",
    "The argument here is strong and easy to follow.",
];

const NEUTRAL: &[&str] = &[
    "The section describes the main idea of the project.",
    "You mention two frameworks in this part.",
    "The example comes from a middle school classroom.",
    "This part summarizes the literature on the topic.",
];

const CRITIQUE: &[&str] = &[
    "Some claims are vague and need evidence.",
    "The structure is confusing in places.",
    "I was not sure how this connects to your thesis.",
    "Consider adding a concrete example here.",
    "A few sentences are repetitive and could be cut.",
];

/// Shape of a synthetic corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthOptions {
    pub works: usize,
    pub peer_reviews_per_work: usize,
    pub max_sections: usize,
    pub courses: Vec<String>,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            works: 6,
            peer_reviews_per_work: 2,
            max_sections: 6,
            courses: vec!["Course A".into(), "Course B".into()],
        }
    }
}

fn sentence(rng: &mut impl Rng) -> String {
    format!(
        "{} {} {} {}.",
        SUBJECTS.choose(rng).unwrap(),
        VERBS.choose(rng).unwrap(),
        OBJECTS.choose(rng).unwrap(),
        CLOSERS.choose(rng).unwrap()
    )
}

fn paragraph(rng: &mut impl Rng) -> String {
    let n = rng.random_range(2..=5);
    (0..n).map(|_| sentence(rng)).collect::<Vec<_>>().join(" ")
}

pub fn synthetic_work(rng: &mut impl Rng, id: &str, course: Option<&str>, max_sections: usize) -> Work {
    let n = rng.random_range(1..=max_sections.max(1));
    let sections = (0..n)
        .map(|i| Section {
            level: if i == 0 { 1 } else { 2 },
            heading: HEADINGS[i % HEADINGS.len()].to_string(),
            paragraphs: (0..rng.random_range(1..=3)).map(|_| paragraph(rng)).collect(),
        })
        .collect();
    Work {
        id: id.to_string(),
        title: format!("{} and {}", SUBJECTS.choose(rng).unwrap(), OBJECTS.choose(rng).unwrap()),
        author_alias: format!("student-{}", rng.random_range(100..1000)),
        course: course.map(str::to_string),
        sections,
    }
}

fn narrative(rng: &mut impl Rng, rating: u8) -> String {
    let n = rng.random_range(1..=3);
    (0..n)
        .map(|_| {
            let roll = rng.random_range(0..10u8);
            // Higher ratings lean toward praise.
            let pool = if roll < rating * 2 {
                PRAISE
            } else if roll < rating * 2 + 2 {
                NEUTRAL
            } else {
                CRITIQUE
            };
            *pool.choose(rng).unwrap()
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// A valid peer review: one rated criterion node per criterion, a couple
/// of anchored annotations linked to criteria, and a closing comment.
pub fn synthetic_peer_review(rng: &mut impl Rng, id: &str, work: &Work, rubric: &Rubric) -> ReviewMap {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let generosity = rng.random_range(0..=2u8);
    for (i, c) in rubric.criteria.iter().enumerate() {
        let rating = (rng.random_range(2..=4u8) + generosity).min(5);
        nodes.push(Node {
            id: format!("c{i}"),
            body: NodeBody::Criterion {
                criterion_code: c.code.clone(),
                rating: Some(rating),
                narrative: narrative(rng, rating),
            },
        });
    }
    for a in 0..rng.random_range(0..=2) {
        let section_index = rng.random_range(0..work.sections.len());
        let len = work.sections[section_index].char_len();
        if len == 0 {
            continue;
        }
        let start = rng.random_range(0..len);
        let end = rng.random_range(start + 1..=len);
        let id = format!("a{a}");
        nodes.push(Node {
            id: id.clone(),
            body: NodeBody::Annotation {
                code: ANNOTATION_CODE_EXAMPLES.choose(rng).unwrap().to_string(),
                anchor: Anchor {
                    section_index,
                    start_char: start,
                    end_char: end,
                },
                comment: narrative(rng, 3),
            },
        });
        if !rubric.criteria.is_empty() {
            edges.push(Edge {
                from: id,
                to: format!("c{}", rng.random_range(0..rubric.criteria.len())),
            });
        }
    }
    nodes.push(Node {
        id: "note".into(),
        body: NodeBody::Comment {
            text: narrative(rng, 4),
        },
    });
    ReviewMap {
        id: id.to_string(),
        work_id: work.id.clone(),
        rubric_id: rubric.id.clone(),
        kind: ReviewKind::Peer,
        reviewer_alias: format!("peer-{}", rng.random_range(100..1000)),
        nodes,
        edges,
    }
}

/// Works and peer reviews only.
pub fn synthetic_corpus(seed: u64, opts: &SynthOptions, rubric: &Rubric) -> ReviewCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut works = Vec::with_capacity(opts.works);
    let mut reviews = Vec::new();
    for w in 0..opts.works {
        let course = (!opts.courses.is_empty()).then(|| opts.courses[w % opts.courses.len()].as_str());
        let work = synthetic_work(&mut rng, &format!("work-{w:03}"), course, opts.max_sections);
        for p in 0..opts.peer_reviews_per_work {
            reviews.push(synthetic_peer_review(&mut rng, &format!("peer-{w:03}-{p}"), &work, rubric));
        }
        works.push(work);
    }
    ReviewCorpus {
        works,
        reviews,
        rubric: rubric.clone(),
    }
}

/// [`synthetic_corpus`] plus one AI review per work from `backend`.
pub fn demo_corpus(
    seed: u64,
    opts: &SynthOptions,
    rubric: &Rubric,
    backend: &dyn CompletionBackend,
    cfg: &PipelineConfig,
) -> Result<ReviewCorpus, PipelineError> {
    let mut corpus = synthetic_corpus(seed, opts, rubric);
    let mut cfg = cfg.clone();
    cfg.seed = Some(cfg.seed.unwrap_or(seed));
    for work in &corpus.works {
        let review = generate_ai_review(work, rubric, backend, &cfg)?;
        corpus.reviews.push(review);
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::default_rubric;
    use crate::llm::MockBackend;

    #[test]
    fn corpora_are_valid_and_seeded() {
        let rubric = default_rubric();
        let opts = SynthOptions::default();
        let a = synthetic_corpus(7, &opts, &rubric);
        assert_eq!(a, synthetic_corpus(7, &opts, &rubric));
        assert_ne!(a, synthetic_corpus(8, &opts, &rubric));
        assert_eq!(a.works.len(), 6);
        assert_eq!(a.reviews.len(), 12);
        assert!(a.violations().is_empty(), "{:?}", a.violations());
        for w in &a.works {
            assert!(w.validate().is_ok());
        }
    }

    #[test]
    fn demo_has_both_kinds() {
        let rubric = default_rubric();
        let c = demo_corpus(3, &SynthOptions::default(), &rubric, &MockBackend::default(), &PipelineConfig::default())
            .unwrap();
        assert_eq!(c.reviews_of_kind(ReviewKind::Ai).count(), 6);
        assert_eq!(c.reviews_of_kind(ReviewKind::Peer).count(), 12);
        assert!(c.violations().is_empty());
    }
}
