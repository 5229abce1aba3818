//! Human-vs-AI review statistics: element tables for ratings and sentiment,
//! corpus word counts, readability descriptives, and text/JSON reports.

mod render;
mod stats;
mod tables;

use thiserror::Error;

pub use render::render_text;
pub use stats::{covariance, describe, normalize, pearson, DescriptiveStats, NormalizationMode};
pub use tables::{
    compare, corpus_summary, element_table, overall_average, AnalysisOptions, ComparisonReport,
    CorpusSummary, ElementStatsRow, ElementTable, KindPair, Metric, ReadabilityPair, SummaryRow,
    WORDS_PER_CRITERION_DIVISOR,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
