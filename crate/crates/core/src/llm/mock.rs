use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{BackendError, CompletionBackend, CompletionRequest, CompletionResult, ContextBudgets};
use crate::text::words;

const ENCOURAGING: &[&str] = &[
    "The work shows a strong and thoughtful grasp of this criterion.",
    "Your use of concrete examples is effective and makes the argument convincing.",
    "This section is well organized and the reasoning is clear and persuasive.",
    "The author demonstrates impressive insight and builds a coherent case.",
    "The discussion is rich, engaging, and supported by relevant evidence.",
    "I appreciate how carefully the key ideas are connected to professional practice.",
    "The analysis is thorough and the conclusions follow naturally from the evidence.",
    "This is an excellent foundation that readers will find valuable.",
];

const INFORMATIONAL: &[&str] = &[
    "The text describes the context of the project and its intended audience.",
    "The work refers to several sources when it introduces the main concepts.",
    "The section outlines the steps of the proposed approach in sequence.",
    "Several terms from the field appear in the introduction and the conclusion.",
    "The argument moves from background information toward a practical proposal.",
    "The author states the purpose of the study in the opening paragraph.",
    "Consider adding a short summary table that lists the main definitions.",
    "A future revision could include data gathered from the author's own setting.",
];

const CRITICAL: &[&str] = &[
    "The connection between the evidence and the main claim remains weak.",
    "Several key terms are vague and need a precise definition.",
    "The reasoning is unclear in places and some steps are missing.",
    "The discussion lacks alternative perspectives and feels one-sided.",
    "Some claims are unsupported and would benefit from stronger sources.",
    "The structure is confusing, which makes the argument difficult to follow.",
    "The application to practice is underdeveloped and lacks specific detail.",
    "The conclusion repeats earlier points without adding new insight.",
];

/// Marker line after which a summarization prompt carries its source text.
pub(crate) const SUMMARY_SOURCE_MARKER: &str = "TEXT:";
const REVIEW_MARKER: &str = "RATING:";
const SUMMARY_WORDS: usize = 40;

/// Deterministic offline backend.
///
/// Output is a pure function of `(model_id, prompt, seed)`. Prompts that ask
/// for a `RATING:` line receive `RATING: k` with `k = 1 + (hash mod 5)`
/// followed by two to five canned feedback sentences whose tone tracks `k`.
/// Any other prompt is treated as a summarization request and answered with
/// the first forty words of the text after the last `TEXT:` line.
#[derive(Debug, Clone, Default)]
pub struct MockBackend {
    budgets: ContextBudgets,
}

impl MockBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_budgets(budgets: ContextBudgets) -> Self {
        MockBackend { budgets }
    }

    pub fn budgets(&self) -> &ContextBudgets {
        &self.budgets
    }
}

fn stable_hash(req: &CompletionRequest) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(req.model_id.as_bytes());
    h.update([0]);
    h.update(req.prompt.as_bytes());
    h.update([0]);
    match req.seed {
        Some(s) => h.update(s.to_le_bytes()),
        None => h.update(b"unseeded"),
    }
    h.finalize().into()
}

/// `1 + (hash mod 5)`, reading the first eight hash bytes little-endian.
pub(crate) fn mock_rating(hash: &[u8; 32]) -> u8 {
    let head = u64::from_le_bytes(hash[..8].try_into().expect("8 bytes"));
    1 + (head % 5) as u8
}

fn review_text(hash: [u8; 32]) -> String {
    let rating = mock_rating(&hash);
    let mut rng = ChaCha8Rng::from_seed(hash);
    let count = rng.random_range(2..=5);
    // tone weights (encouraging, informational, critical) per rating
    let weights: [u32; 3] = match rating {
        1 => [0, 2, 8],
        2 => [1, 4, 5],
        3 => [3, 4, 3],
        4 => [5, 4, 1],
        _ => [8, 2, 0],
    };
    let total: u32 = weights.iter().sum();
    let mut out = format!("{REVIEW_MARKER} {rating}\n");
    let mut used = Vec::with_capacity(count);
    while used.len() < count {
        let mut pick = rng.random_range(0..total);
        let pool = if pick < weights[0] {
            ENCOURAGING
        } else {
            pick -= weights[0];
            if pick < weights[1] {
                INFORMATIONAL
            } else {
                CRITICAL
            }
        };
        let sentence = pool[rng.random_range(0..pool.len())];
        if !used.contains(&sentence) {
            used.push(sentence);
        }
    }
    out.push_str(&used.join(" "));
    out
}

fn summary_text(prompt: &str) -> String {
    let source = prompt
        .rfind(&format!("\n{SUMMARY_SOURCE_MARKER}\n"))
        .map(|i| &prompt[i + SUMMARY_SOURCE_MARKER.len() + 2..])
        .unwrap_or(prompt);
    let head: Vec<&str> = words(source).take(SUMMARY_WORDS).collect();
    if head.is_empty() {
        "The section has no prose to summarize.".to_string()
    } else {
        format!("{}.", head.join(" "))
    }
}

impl CompletionBackend for MockBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult, BackendError> {
        request.validate()?;
        self.budgets.check(request)?;
        let text = if request.prompt.contains(REVIEW_MARKER) {
            review_text(stable_hash(request))
        } else {
            summary_text(&request.prompt)
        };
        Ok(CompletionResult::new(&request.prompt, text))
    }
}
