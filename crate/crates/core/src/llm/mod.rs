//! Pluggable text completion.
//!
//! [`CompletionBackend`] is the only surface the review pipeline sees.
//! [`MockBackend`] is deterministic and offline; [`RemoteBackend`] posts to
//! an HTTP completion endpoint with bearer auth and retries.

pub(crate) mod mock;
mod remote;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mock::MockBackend;
pub use remote::{
    HttpResponse, HttpTransport, RemoteBackend, RemoteConfig, RetryPolicy, Transport,
    API_KEY_ENV, API_URL_ENV,
};

pub const DEFAULT_SUMMARIZER_MODEL: &str = "text-curie-001";
pub const DEFAULT_REVIEWER_MODEL: &str = "text-davinci-003";
pub const DEFAULT_SUMMARIZER_BUDGET: usize = 2048;
pub const DEFAULT_REVIEWER_BUDGET: usize = 4000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BackendError {
    #[error("credential rejected (HTTP {status})")]
    Auth { status: u16 },
    #[error("rate limited")]
    RateLimited,
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("unexpected HTTP status {status}")]
    Status { status: u16 },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("prompt needs ~{estimate} tokens but `{model}` allows {budget}")]
    BudgetExceeded {
        model: String,
        estimate: usize,
        budget: usize,
    },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("backend not configured: {0}")]
    NotConfigured(String),
}

impl BackendError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, BackendError::RateLimited | BackendError::Transport(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model_id: String,
    pub prompt: String,
    pub max_output_tokens: u32,
    pub temperature: f64,
    pub seed: Option<u64>,
}

impl CompletionRequest {
    pub fn new(model_id: impl Into<String>, prompt: impl Into<String>) -> Self {
        CompletionRequest {
            model_id: model_id.into(),
            prompt: prompt.into(),
            max_output_tokens: 512,
            temperature: 0.0,
            seed: None,
        }
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        if self.prompt.is_empty() {
            return Err(BackendError::InvalidRequest("empty prompt".into()));
        }
        if self.max_output_tokens == 0 {
            return Err(BackendError::InvalidRequest("max_output_tokens must be >= 1".into()));
        }
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(BackendError::InvalidRequest("temperature must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionResult {
    pub text: String,
    pub prompt_token_estimate: usize,
    pub output_token_estimate: usize,
}

impl CompletionResult {
    pub fn new(prompt: &str, text: String) -> Self {
        CompletionResult {
            prompt_token_estimate: estimate_tokens(prompt),
            output_token_estimate: estimate_tokens(&text),
            text,
        }
    }
}

/// A text-completion service. Implementations must accept concurrent calls.
pub trait CompletionBackend: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult, BackendError>;
}

impl<B: CompletionBackend + ?Sized> CompletionBackend for &B {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult, BackendError> {
        (**self).complete(request)
    }
}

impl<B: CompletionBackend + ?Sized> CompletionBackend for Box<B> {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult, BackendError> {
        (**self).complete(request)
    }
}

/// Coarse token count: characters / 4, rounded up.
pub fn estimate_tokens(text: &str) -> usize {
    text.chars().count().div_ceil(4)
}

/// Per-model prompt budgets in estimated tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextBudgets {
    pub by_model: BTreeMap<String, usize>,
    pub fallback: usize,
}

impl Default for ContextBudgets {
    fn default() -> Self {
        Self::for_roles(DEFAULT_SUMMARIZER_MODEL, DEFAULT_REVIEWER_MODEL)
    }
}

impl ContextBudgets {
    pub fn for_roles(summarizer: &str, reviewer: &str) -> Self {
        let mut by_model = BTreeMap::new();
        by_model.insert(reviewer.to_string(), DEFAULT_REVIEWER_BUDGET);
        by_model.insert(summarizer.to_string(), DEFAULT_SUMMARIZER_BUDGET);
        ContextBudgets {
            by_model,
            fallback: DEFAULT_REVIEWER_BUDGET,
        }
    }

    pub fn budget(&self, model: &str) -> usize {
        self.by_model.get(model).copied().unwrap_or(self.fallback)
    }

    pub fn check(&self, request: &CompletionRequest) -> Result<(), BackendError> {
        let estimate = estimate_tokens(&request.prompt);
        let budget = self.budget(&request.model_id);
        if estimate > budget {
            return Err(BackendError::BudgetExceeded {
                model: request.model_id.clone(),
                estimate,
                budget,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_estimates() {
        assert_eq!(estimate_tokens(""), 0);
        assert_eq!(estimate_tokens("abcdefgh"), 2);
        assert_eq!(estimate_tokens("abcdefghi"), 3);
        assert_eq!(estimate_tokens("é"), 1);
    }

    #[test]
    fn request_validation() {
        let mut r = CompletionRequest::new("m", "p");
        assert!(r.validate().is_ok());
        r.max_output_tokens = 0;
        assert!(matches!(r.validate(), Err(BackendError::InvalidRequest(_))));
        r.max_output_tokens = 1;
        r.temperature = f64::NAN;
        assert!(r.validate().is_err());
        r.temperature = 0.7;
        r.prompt.clear();
        assert!(r.validate().is_err());
    }

    #[test]
    fn budgets_by_role() {
        let b = ContextBudgets::default();
        assert_eq!(b.budget(DEFAULT_SUMMARIZER_MODEL), 2048);
        assert_eq!(b.budget(DEFAULT_REVIEWER_MODEL), 4000);
        assert_eq!(b.budget("other"), 4000);
        let big = CompletionRequest::new(DEFAULT_SUMMARIZER_MODEL, "x".repeat(2048 * 4 + 1));
        assert!(matches!(
            b.check(&big),
            Err(BackendError::BudgetExceeded { estimate: 2049, budget: 2048, .. })
        ));
    }

    #[test]
    fn retryable_classes() {
        assert!(BackendError::RateLimited.is_retryable());
        assert!(BackendError::Transport("reset".into()).is_retryable());
        assert!(!BackendError::Auth { status: 401 }.is_retryable());
        assert!(!BackendError::MalformedResponse(String::new()).is_retryable());
    }
}
