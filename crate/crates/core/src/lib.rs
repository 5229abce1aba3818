//! Rubric-driven AI review generation and human-vs-AI review analytics.
//!
//! Works are split into sections, summarized when they exceed a model's
//! context budget, and reviewed one rubric criterion at a time through a
//! [`llm::CompletionBackend`]. The resulting review maps, together with
//! human peer reviews, feed the [`analytics`] battery: ratings, sentiment
//! and readability compared per reporting element.

pub mod analytics;
pub mod corpus;
pub mod text;
pub mod llm;
pub mod pipeline;
pub mod readability;
pub mod sentiment;
pub mod storage;
pub mod synth;
