//! AI review generation.
//!
//! A work is reduced to a summary that fits the reviewer's context budget
//! (sections pass through verbatim when the whole text already fits), then
//! each rubric criterion is sent as its own prompt. Responses carry a
//! `RATING: k` line followed by narrative feedback and become criterion
//! nodes of a [`ReviewMap`], in rubric order.

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{Criterion, Node, NodeBody, ReviewKind, ReviewMap, Rubric, Section, Work};
use crate::llm::mock::SUMMARY_SOURCE_MARKER;
use crate::llm::{
    estimate_tokens, BackendError, CompletionBackend, CompletionRequest, DEFAULT_REVIEWER_BUDGET,
    DEFAULT_REVIEWER_MODEL, DEFAULT_SUMMARIZER_MODEL,
};

/// Summarization rounds attempted before giving up.
pub const MAX_SUMMARY_ROUNDS: u32 = 3;
pub const MIN_CONTEXT_BUDGET: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("summary still needs ~{estimate} tokens after {rounds} rounds (target {target})")]
    BudgetUnreachable {
        rounds: u32,
        estimate: usize,
        target: usize,
    },
    #[error("prompt for criterion `{criterion}` needs ~{overhead} tokens before any student text; budget is {budget}")]
    PromptTooLarge {
        criterion: String,
        overhead: usize,
        budget: usize,
    },
    #[error("criterion `{criterion}`: {source}")]
    RatingUnparseable {
        criterion: String,
        source: RatingUnparseable,
    },
    #[error("rubric has no criteria")]
    EmptyRubric,
    #[error("invalid pipeline configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RatingUnparseable {
    #[error("no `RATING: k` line in response")]
    Missing,
    #[error("rating {0} is outside 1..=5")]
    OutOfRange(i64),
}

/// Prompt-framing text: what theory of knowledge the reviewer applies,
/// what facts it may use, and which domain terms it must respect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrameConfig {
    pub epistemic_preamble: String,
    pub empirical_notice: String,
    pub ontology_terms: Option<Vec<(String, String)>>,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig {
            epistemic_preamble: "Review the work through the knowledge process described below. \
                Judge the kind of knowledge-making the author does, not only the correctness of the writing."
                .to_string(),
            empirical_notice: "Comment only on facts and claims present in the supplied text. \
                Do not introduce outside facts or sources, and say so when the text lacks the evidence \
                needed to judge this criterion."
                .to_string(),
            ontology_terms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub summarizer_model: String,
    pub reviewer_model: String,
    pub system_instructions: String,
    pub summary_instructions: String,
    /// Summarize even when the full text fits the budget.
    pub always_summarize: bool,
    pub context_budget_tokens: usize,
    pub parallelism: usize,
    pub frames: FrameConfig,
    /// Keep criteria whose response has no usable rating, with the rating
    /// absent, instead of failing the review.
    pub lenient: bool,
    pub max_output_tokens: u32,
    pub temperature: f64,
    pub seed: Option<u64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            summarizer_model: DEFAULT_SUMMARIZER_MODEL.to_string(),
            reviewer_model: DEFAULT_REVIEWER_MODEL.to_string(),
            system_instructions: "You are a supportive but rigorous reviewer of graduate student work. \
                Give specific, constructive feedback the author can act on."
                .to_string(),
            summary_instructions: "Summarize the following section of a student's work in a few sentences, \
                keeping its main claims, evidence, and key terms."
                .to_string(),
            always_summarize: false,
            context_budget_tokens: DEFAULT_REVIEWER_BUDGET,
            parallelism: 4,
            frames: FrameConfig::default(),
            lenient: false,
            max_output_tokens: 512,
            temperature: 0.0,
            seed: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::InvalidConfig(m.to_string()));
        if self.parallelism < 1 {
            return bad("parallelism must be >= 1");
        }
        if self.context_budget_tokens < MIN_CONTEXT_BUDGET {
            return bad("context_budget_tokens must be >= 64");
        }
        if let Some(terms) = &self.frames.ontology_terms {
            let mut seen = HashSet::new();
            if let Some((t, _)) = terms.iter().find(|(t, _)| !seen.insert(t.as_str())) {
                return Err(PipelineError::InvalidConfig(format!(
                    "ontology term `{t}` listed twice"
                )));
            }
        }
        Ok(())
    }

    fn request(&self, model: &str, prompt: String) -> CompletionRequest {
        CompletionRequest {
            model_id: model.to_string(),
            prompt,
            max_output_tokens: self.max_output_tokens,
            temperature: self.temperature,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkSummary {
    pub work_id: String,
    pub section_summaries: Vec<String>,
    pub concatenated: String,
    /// Summarization rounds run; 0 when sections passed through verbatim.
    pub rounds: u32,
}

impl WorkSummary {
    fn from_parts(work_id: &str, section_summaries: Vec<String>, rounds: u32) -> Self {
        WorkSummary {
            work_id: work_id.to_string(),
            concatenated: section_summaries.join("\n\n"),
            section_summaries,
            rounds,
        }
    }
}

/// Run `f` over `items` on up to `parallelism` threads; results keep input
/// order.
fn fan_out<T, R, F>(items: &[T], parallelism: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = parallelism.min(items.len());
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = f(item);
                slots.lock().expect("result slots")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("result slots")
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}

fn section_source(s: &Section) -> String {
    if s.paragraphs.is_empty() {
        s.heading.clone()
    } else {
        format!("{}\n\n{}", s.heading, s.text())
    }
}

fn summary_prompt(cfg: &PipelineConfig, source: &str) -> String {
    format!("{}\n{SUMMARY_SOURCE_MARKER}\n{source}", cfg.summary_instructions)
}

/// Summarize `work` so the concatenated summary fits
/// `cfg.context_budget_tokens`.
pub fn summarize_work(
    work: &Work,
    backend: &dyn CompletionBackend,
    cfg: &PipelineConfig,
) -> Result<WorkSummary, PipelineError> {
    cfg.validate()?;
    summarize_within(work, backend, cfg, cfg.context_budget_tokens)
}

fn summarize_within(
    work: &Work,
    backend: &dyn CompletionBackend,
    cfg: &PipelineConfig,
    target: usize,
) -> Result<WorkSummary, PipelineError> {
    let mut current: Vec<String> = work.sections.iter().map(section_source).collect();
    if !cfg.always_summarize && estimate_tokens(&current.join("\n\n")) <= target {
        return Ok(WorkSummary::from_parts(&work.id, current, 0));
    }

    for round in 1..=MAX_SUMMARY_ROUNDS {
        let prompts: Vec<String> = current.iter().map(|s| summary_prompt(cfg, s)).collect();
        let results = fan_out(&prompts, cfg.parallelism, |p| {
            backend.complete(&cfg.request(&cfg.summarizer_model, p.clone()))
        });
        current = results
            .into_iter()
            .map(|r| r.map(|c| c.text.trim().to_string()))
            .collect::<Result<_, _>>()?;
        let summary = WorkSummary::from_parts(&work.id, current.clone(), round);
        let estimate = estimate_tokens(&summary.concatenated);
        if estimate <= target {
            return Ok(summary);
        }
        if round == MAX_SUMMARY_ROUNDS {
            return Err(PipelineError::BudgetUnreachable {
                rounds: round,
                estimate,
                target,
            });
        }
    }
    unreachable!("loop returns on its last round")
}

/// Closing instruction of every review prompt.
pub const RATING_INSTRUCTION: &str = "Respond with a first line of the form `RATING: <1-5>` giving the \
    rating level that best matches the work, then write your narrative review for this criterion.";

/// Assemble the prompt for one criterion: system instructions, epistemic
/// framing, the criterion with its five level descriptors, the empirical
/// notice, an optional glossary, the summary, and the rating instruction.
pub fn build_review_prompt(criterion: &Criterion, summary: &WorkSummary, cfg: &PipelineConfig) -> String {
    let mut blocks: Vec<String> = Vec::new();
    let mut push = |s: &str| {
        if !s.trim().is_empty() {
            blocks.push(s.trim().to_string());
        }
    };
    push(&cfg.system_instructions);
    push(&cfg.frames.epistemic_preamble);

    let mut c = format!(
        "Criterion: {}\nDefinition: {}\nAdvice to reviewers: {}",
        criterion.name, criterion.definition, criterion.reviewer_advice
    );
    if !criterion.marker_words.is_empty() {
        c.push_str(&format!("\nMarker words: {}", criterion.marker_words.join(", ")));
    }
    c.push_str("\nRating levels:");
    for (i, d) in criterion.level_descriptors.iter().enumerate() {
        c.push_str(&format!("\n{}: {}", i + 1, d));
    }
    push(&c);
    push(&cfg.frames.empirical_notice);

    if let Some(terms) = cfg.frames.ontology_terms.as_ref().filter(|t| !t.is_empty()) {
        let mut g = String::from("Glossary (use these terms with exactly these meanings):");
        for (term, def) in terms {
            g.push_str(&format!("\n- {term}: {def}"));
        }
        push(&g);
    }

    blocks.push(format!("Student work:\n{}", summary.concatenated));
    blocks.push(RATING_INSTRUCTION.to_string());
    blocks.join("\n\n")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionResponse {
    pub rating: u8,
    pub narrative: String,
}

/// Read the first `RATING: k` line; the rest of the text is the narrative.
pub fn parse_criterion_response(text: &str) -> Result<CriterionResponse, RatingUnparseable> {
    let lines: Vec<&str> = text.lines().collect();
    for (i, line) in lines.iter().enumerate() {
        let Some(value) = line.trim().strip_prefix("RATING:") else {
            continue;
        };
        let Ok(k) = value.trim().parse::<i64>() else {
            continue;
        };
        if !(1..=5).contains(&k) {
            return Err(RatingUnparseable::OutOfRange(k));
        }
        let narrative = lines
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, l)| *l)
            .collect::<Vec<_>>()
            .join("\n");
        return Ok(CriterionResponse {
            rating: k as u8,
            narrative: narrative.trim().to_string(),
        });
    }
    Err(RatingUnparseable::Missing)
}

fn review_id(work: &Work, rubric: &Rubric, cfg: &PipelineConfig) -> String {
    let mut h = Sha256::new();
    for part in [&work.id, &rubric.id, &cfg.reviewer_model] {
        h.update(part.as_bytes());
        h.update([0]);
    }
    h.update(cfg.seed.map_or_else(|| "none".to_string(), |s| s.to_string()));
    format!("ai-{}", &hex::encode(h.finalize())[..16])
}

/// Review `work` against every criterion of `rubric`.
pub fn generate_ai_review(
    work: &Work,
    rubric: &Rubric,
    backend: &dyn CompletionBackend,
    cfg: &PipelineConfig,
) -> Result<ReviewMap, PipelineError> {
    cfg.validate()?;
    if rubric.criteria.is_empty() {
        return Err(PipelineError::EmptyRubric);
    }

    // Budget left for the summary once the largest criterion prompt is paid for.
    let empty = WorkSummary::from_parts(&work.id, Vec::new(), 0);
    let (overhead, widest) = rubric
        .criteria
        .iter()
        .map(|c| (estimate_tokens(&build_review_prompt(c, &empty, cfg)), c))
        .max_by_key(|(t, _)| *t)
        .expect("non-empty rubric");
    if overhead >= cfg.context_budget_tokens {
        return Err(PipelineError::PromptTooLarge {
            criterion: widest.code.clone(),
            overhead,
            budget: cfg.context_budget_tokens,
        });
    }
    let summary = summarize_within(work, backend, cfg, cfg.context_budget_tokens - overhead)?;

    let results = fan_out(&rubric.criteria, cfg.parallelism, |c| {
        let prompt = build_review_prompt(c, &summary, cfg);
        backend.complete(&cfg.request(&cfg.reviewer_model, prompt))
    });

    let mut nodes = Vec::with_capacity(rubric.criteria.len());
    for (criterion, result) in rubric.criteria.iter().zip(results) {
        let text = result?.text;
        let (rating, narrative) = match parse_criterion_response(&text) {
            Ok(r) => (Some(r.rating), r.narrative),
            Err(_) if cfg.lenient => (None, text.trim().to_string()),
            Err(source) => {
                return Err(PipelineError::RatingUnparseable {
                    criterion: criterion.code.clone(),
                    source,
                })
            }
        };
        nodes.push(Node {
            id: format!("ai-{}", criterion.code),
            body: NodeBody::Criterion {
                criterion_code: criterion.code.clone(),
                rating,
                narrative,
            },
        });
    }

    Ok(ReviewMap {
        id: review_id(work, rubric, cfg),
        work_id: work.id.clone(),
        rubric_id: rubric.id.clone(),
        kind: ReviewKind::Ai,
        reviewer_alias: format!("ai:{}", cfg.reviewer_model),
        nodes,
        edges: Vec::new(),
    })
}
