use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{BackendError, CompletionBackend, CompletionRequest, CompletionResult, ContextBudgets};

pub const API_KEY_ENV: &str = "RUBRIQ_API_KEY";
pub const API_URL_ENV: &str = "RUBRIQ_API_URL";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay_ms: u64,
    pub backoff_factor: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 3,
            base_delay_ms: 500,
            backoff_factor: 2.0,
        }
    }
}

impl RetryPolicy {
    pub fn validate(&self) -> Result<(), BackendError> {
        if self.max_attempts < 1 {
            return Err(BackendError::NotConfigured("max_attempts must be >= 1".into()));
        }
        if self.backoff_factor.is_nan() || self.backoff_factor < 1.0 {
            return Err(BackendError::NotConfigured("backoff_factor must be >= 1".into()));
        }
        Ok(())
    }

    /// Wait before retrying after failed attempt `attempt` (1-based):
    /// `base_delay_ms * backoff_factor^(attempt - 1)`.
    pub fn delay_after(&self, attempt: u32) -> Duration {
        let ms = self.base_delay_ms as f64 * self.backoff_factor.powi(attempt as i32 - 1);
        Duration::from_secs_f64(ms / 1000.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

/// Sends one JSON POST. `Err` means no HTTP response was obtained.
pub trait Transport: Send + Sync {
    fn post_json(&self, url: &str, bearer_token: &str, body: &str) -> Result<HttpResponse, String>;
}

/// Blocking HTTP(S) transport.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        HttpTransport { agent }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(120))
    }
}

impl Transport for HttpTransport {
    fn post_json(&self, url: &str, bearer_token: &str, body: &str) -> Result<HttpResponse, String> {
        let mut resp = self
            .agent
            .post(url)
            .header("Authorization", &format!("Bearer {bearer_token}"))
            .header("Content-Type", "application/json")
            .send(body)
            .map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(|e| e.to_string())?;
        Ok(HttpResponse { status, body })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteConfig {
    pub endpoint: String,
    #[serde(skip_serializing, default)]
    pub api_key: String,
    /// JSON pointer to the completion text in the response body.
    pub text_pointer: String,
    pub retry: RetryPolicy,
    pub budgets: ContextBudgets,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>, api_key: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            api_key: api_key.into(),
            text_pointer: "/choices/0/text".to_string(),
            retry: RetryPolicy::default(),
            budgets: ContextBudgets::default(),
        }
    }

    /// Endpoint from `RUBRIQ_API_URL`, credential from `RUBRIQ_API_KEY`.
    pub fn from_env() -> Result<Self, BackendError> {
        let get = |name: &str| {
            std::env::var(name)
                .ok()
                .filter(|v| !v.trim().is_empty())
                .ok_or_else(|| BackendError::NotConfigured(format!("{name} is not set")))
        };
        Ok(Self::new(get(API_URL_ENV)?, get(API_KEY_ENV)?))
    }
}

type Sleeper = Box<dyn Fn(Duration) + Send + Sync>;

/// Completion over HTTP with bearer auth and geometric-backoff retries.
///
/// 429 and 5xx responses and transport failures are retried; 401/403 and
/// malformed bodies are not.
pub struct RemoteBackend {
    config: RemoteConfig,
    transport: Box<dyn Transport>,
    sleeper: Sleeper,
}

impl RemoteBackend {
    pub fn new(config: RemoteConfig) -> Result<Self, BackendError> {
        Self::with_transport(config, HttpTransport::default())
    }

    pub fn with_transport(
        config: RemoteConfig,
        transport: impl Transport + 'static,
    ) -> Result<Self, BackendError> {
        if config.endpoint.is_empty() {
            return Err(BackendError::NotConfigured("empty endpoint".into()));
        }
        if config.api_key.is_empty() {
            return Err(BackendError::NotConfigured("empty API key".into()));
        }
        config.retry.validate()?;
        Ok(RemoteBackend {
            config,
            transport: Box::new(transport),
            sleeper: Box::new(std::thread::sleep),
        })
    }

    /// Replace the function used to wait between attempts.
    pub fn with_sleeper(mut self, sleeper: impl Fn(Duration) + Send + Sync + 'static) -> Self {
        self.sleeper = Box::new(sleeper);
        self
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    fn attempt(&self, body: &str) -> Result<String, BackendError> {
        let resp = self
            .transport
            .post_json(&self.config.endpoint, &self.config.api_key, body)
            .map_err(BackendError::Transport)?;
        match resp.status {
            200..=299 => {
                let value: serde_json::Value = serde_json::from_str(&resp.body)
                    .map_err(|e| BackendError::MalformedResponse(e.to_string()))?;
                value
                    .pointer(&self.config.text_pointer)
                    .and_then(|v| v.as_str())
                    .map(str::to_string)
                    .ok_or_else(|| {
                        BackendError::MalformedResponse(format!(
                            "no string at {}",
                            self.config.text_pointer
                        ))
                    })
            }
            401 | 403 => Err(BackendError::Auth {
                status: resp.status,
            }),
            429 => Err(BackendError::RateLimited),
            500..=599 => Err(BackendError::Transport(format!("HTTP {}", resp.status))),
            status => Err(BackendError::Status { status }),
        }
    }
}

impl CompletionBackend for RemoteBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult, BackendError> {
        request.validate()?;
        self.config.budgets.check(request)?;
        let body = json!({
            "model": request.model_id,
            "prompt": request.prompt,
            "max_tokens": request.max_output_tokens,
            "temperature": request.temperature,
        })
        .to_string();

        let retry = self.config.retry;
        let mut attempt = 1;
        loop {
            match self.attempt(&body) {
                Ok(text) => return Ok(CompletionResult::new(&request.prompt, text)),
                Err(e) if e.is_retryable() && attempt < retry.max_attempts => {
                    (self.sleeper)(retry.delay_after(attempt));
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::{Arc, Mutex};

    use super::*;

    /// Replays canned responses and records request bodies.
    struct Scripted {
        responses: Mutex<Vec<Result<HttpResponse, String>>>,
        seen: Seen,
    }

    type Seen = Arc<Mutex<Vec<(String, String)>>>;

    impl Scripted {
        fn new(script: Vec<Result<HttpResponse, String>>) -> (Self, Seen) {
            let seen = Arc::new(Mutex::new(Vec::new()));
            let mut responses = script;
            responses.reverse();
            (
                Scripted {
                    responses: Mutex::new(responses),
                    seen: seen.clone(),
                },
                seen,
            )
        }
    }

    impl Transport for Scripted {
        fn post_json(&self, _url: &str, token: &str, body: &str) -> Result<HttpResponse, String> {
            self.seen.lock().unwrap().push((token.to_string(), body.to_string()));
            self.responses.lock().unwrap().pop().expect("script exhausted")
        }
    }

    fn status(code: u16) -> Result<HttpResponse, String> {
        Ok(HttpResponse {
            status: code,
            body: String::new(),
        })
    }

    fn ok(text: &str) -> Result<HttpResponse, String> {
        Ok(HttpResponse {
            status: 200,
            body: json!({"choices": [{"text": text}]}).to_string(),
        })
    }

    fn backend(script: Vec<Result<HttpResponse, String>>) -> (RemoteBackend, Seen, Arc<Mutex<Vec<Duration>>>) {
        let (t, seen) = Scripted::new(script);
        let mut cfg = RemoteConfig::new("https://example.invalid/v1/completions", "sk-test");
        cfg.retry = RetryPolicy {
            max_attempts: 3,
            base_delay_ms: 100,
            backoff_factor: 2.0,
        };
        let delays = Arc::new(Mutex::new(Vec::new()));
        let d = delays.clone();
        let b = RemoteBackend::with_transport(cfg, t)
            .unwrap()
            .with_sleeper(move |dur| d.lock().unwrap().push(dur));
        (b, seen, delays)
    }

    fn request() -> CompletionRequest {
        CompletionRequest::new("text-davinci-003", "Review this.")
    }

    #[test]
    fn rate_limit_then_success() {
        let (b, seen, delays) = backend(vec![status(429), ok("RATING: 3\nFine.")]);
        let out = b.complete(&request()).unwrap();
        assert_eq!(out.text, "RATING: 3\nFine.");
        assert_eq!(seen.lock().unwrap().len(), 2);
        assert_eq!(*delays.lock().unwrap(), vec![Duration::from_millis(100)]);
    }

    #[test]
    fn auth_failure_is_final() {
        let (b, seen, delays) = backend(vec![status(401), ok("never")]);
        assert_eq!(b.complete(&request()), Err(BackendError::Auth { status: 401 }));
        assert_eq!(seen.lock().unwrap().len(), 1);
        assert!(delays.lock().unwrap().is_empty());
    }

    #[test]
    fn gives_up_after_max_attempts() {
        let (b, seen, delays) = backend(vec![Err("reset".into()), status(503), status(429)]);
        assert_eq!(b.complete(&request()), Err(BackendError::RateLimited));
        assert_eq!(seen.lock().unwrap().len(), 3);
        assert_eq!(
            *delays.lock().unwrap(),
            vec![Duration::from_millis(100), Duration::from_millis(200)]
        );
    }

    #[test]
    fn request_body_and_token() {
        let (b, seen, _) = backend(vec![ok("x")]);
        b.complete(&request()).unwrap();
        let (token, body) = seen.lock().unwrap()[0].clone();
        assert_eq!(token, "sk-test");
        let v: serde_json::Value = serde_json::from_str(&body).unwrap();
        assert_eq!(
            v,
            json!({"model": "text-davinci-003", "prompt": "Review this.", "max_tokens": 512, "temperature": 0.0})
        );
    }

    #[test]
    fn malformed_bodies() {
        let (b, _, _) = backend(vec![Ok(HttpResponse { status: 200, body: "not json".into() })]);
        assert!(matches!(b.complete(&request()), Err(BackendError::MalformedResponse(_))));
        let (b, _, _) = backend(vec![Ok(HttpResponse { status: 200, body: "{\"x\":1}".into() })]);
        assert!(matches!(b.complete(&request()), Err(BackendError::MalformedResponse(_))));
        let (b, _, _) = backend(vec![status(404)]);
        assert_eq!(b.complete(&request()), Err(BackendError::Status { status: 404 }));
    }

    #[test]
    fn budget_checked_before_sending() {
        let (b, seen, _) = backend(vec![]);
        let req = CompletionRequest::new("text-curie-001", "y".repeat(10_000));
        assert!(matches!(b.complete(&req), Err(BackendError::BudgetExceeded { .. })));
        assert!(seen.lock().unwrap().is_empty());
    }

    #[test]
    fn geometric_delays() {
        let p = RetryPolicy {
            max_attempts: 5,
            base_delay_ms: 250,
            backoff_factor: 1.5,
        };
        let ms: Vec<u128> = (1..=4).map(|a| p.delay_after(a).as_millis()).collect();
        assert_eq!(ms, vec![250, 375, 562, 843]);
        assert!(RetryPolicy { max_attempts: 0, ..p }.validate().is_err());
        assert!(RetryPolicy { backoff_factor: 0.5, ..p }.validate().is_err());
    }

    #[test]
    fn missing_configuration() {
        assert!(matches!(
            RemoteBackend::new(RemoteConfig::new("", "k")),
            Err(BackendError::NotConfigured(_))
        ));
        assert!(matches!(
            RemoteBackend::new(RemoteConfig::new("http://x", "")),
            Err(BackendError::NotConfigured(_))
        ));
    }
}
