use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use rubriq_core::analytics::{AnalysisOptions, NormalizationMode};
use rubriq_core::llm::{
    CompletionBackend, ContextBudgets, MockBackend, RemoteBackend, RemoteConfig, RetryPolicy,
    API_KEY_ENV, API_URL_ENV,
};
use rubriq_core::pipeline::PipelineConfig;
use rubriq_core::sentiment::{load_lexicon, Lexicon, LexiconAnalyzer, Thresholds};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Mock,
    Remote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    MinMax,
    RangeDivide,
    None,
}

impl Normalization {
    pub fn mode(self) -> Option<NormalizationMode> {
        match self {
            Normalization::MinMax => Some(NormalizationMode::MinMax),
            Normalization::RangeDivide => Some(NormalizationMode::RangeDivide),
            Normalization::None => None,
        }
    }
}

/// Remote endpoint settings. The key is only ever read from the
/// environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RemoteSettings {
    /// Overrides `RUBRIQ_API_URL`.
    pub endpoint: Option<String>,
    pub text_pointer: String,
    pub retry: RetryPolicy,
    pub timeout_secs: u64,
}

impl Default for RemoteSettings {
    fn default() -> Self {
        RemoteSettings {
            endpoint: None,
            text_pointer: "/choices/0/text".to_string(),
            retry: RetryPolicy::default(),
            timeout_secs: 120,
        }
    }
}

/// Contents of the `--config` JSON file. Every field is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub backend: BackendKind,
    pub pipeline: PipelineConfig,
    pub thresholds: Thresholds,
    pub normalization: Normalization,
    /// Lexicon TSV replacing the bundled one.
    pub lexicon: Option<PathBuf>,
    /// Rubric JSON used when a command gets no `--rubric`.
    pub rubric: Option<PathBuf>,
    pub remote: RemoteSettings,
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn analysis(&self) -> AnalysisOptions {
        AnalysisOptions {
            normalization: self.normalization.mode(),
        }
    }

    fn budgets(&self) -> ContextBudgets {
        ContextBudgets::for_roles(&self.pipeline.summarizer_model, &self.pipeline.reviewer_model)
    }

    /// The configured completion backend. Only `remote` touches the network.
    pub fn backend(&self) -> Result<Box<dyn CompletionBackend>, CliError> {
        match self.backend {
            BackendKind::Mock => Ok(Box::new(MockBackend::with_budgets(self.budgets()))),
            BackendKind::Remote => {
                let env = |name: &str| std::env::var(name).ok().filter(|v| !v.trim().is_empty());
                let endpoint = self
                    .remote
                    .endpoint
                    .clone()
                    .or_else(|| env(API_URL_ENV))
                    .ok_or_else(|| CliError::Domain(format!("remote backend needs {API_URL_ENV} or remote.endpoint")))?;
                let key = env(API_KEY_ENV)
                    .ok_or_else(|| CliError::Domain(format!("remote backend needs {API_KEY_ENV}")))?;
                let mut cfg = RemoteConfig::new(endpoint, key);
                cfg.text_pointer = self.remote.text_pointer.clone();
                cfg.retry = self.remote.retry;
                cfg.budgets = self.budgets();
                let transport = rubriq_core::llm::HttpTransport::new(std::time::Duration::from_secs(
                    self.remote.timeout_secs,
                ));
                let backend = RemoteBackend::with_transport(cfg, transport).map_err(|e| CliError::Domain(e.to_string()))?;
                Ok(Box::new(backend))
            }
        }
    }

    pub fn analyzer(&self) -> Result<LexiconAnalyzer, CliError> {
        let lexicon = match &self.lexicon {
            Some(path) => {
                let text = crate::read_input(path)?;
                load_lexicon(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?
            }
            None => Lexicon::starter(),
        };
        Ok(LexiconAnalyzer {
            lexicon,
            thresholds: self.thresholds,
        })
    }
}
