use std::fmt::Write;
use std::path::Path;

use serde::Serialize;

use rubriq_core::analytics::{compare, render_text, ComparisonReport};
use rubriq_core::corpus::{
    default_rubric, parse_rubric, parse_work, validate_review_map, NodeBody, ReviewMap, Rubric, Violation, Work,
};
use rubriq_core::pipeline::generate_ai_review;
use rubriq_core::readability::{composite_grade, text_stats};
use rubriq_core::sentiment::SentimentAnalyzer;
use rubriq_core::storage::{load_corpus, save_corpus, StorageError};
use rubriq_core::synth::{demo_corpus, SynthOptions};

use crate::{read_input, CliError, Command, Context, Format, TextInput};

const DEFAULT_DEMO_SEED: u64 = 42;

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

fn violation_lines(items: &[(String, Vec<Violation>)]) -> String {
    let mut out = String::new();
    for (id, vs) in items {
        for v in vs {
            let _ = writeln!(out, "  {id}: {v}");
        }
    }
    out
}

fn storage_err(e: StorageError) -> CliError {
    match e {
        StorageError::ValidationFailed(items) => {
            CliError::Domain(format!("corpus failed validation:\n{}", violation_lines(&items).trim_end()))
        }
        other => domain(other),
    }
}

fn load_work(path: &Path) -> Result<Work, CliError> {
    parse_work(&read_input(path)?).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn load_rubric(explicit: Option<&Path>, ctx: &Context) -> Result<Rubric, CliError> {
    match explicit.or(ctx.config.rubric.as_deref()) {
        Some(path) => {
            parse_rubric(&read_input(path)?).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
        }
        None => Ok(default_rubric()),
    }
}

fn load_review(path: &Path) -> Result<ReviewMap, CliError> {
    serde_json::from_str(&read_input(path)?).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn input_text(input: &TextInput) -> Result<String, CliError> {
    if let Some(t) = &input.text {
        return Ok(t.clone());
    }
    if let Some(p) = &input.file {
        return read_input(p);
    }
    if let Some(p) = &input.review {
        return Ok(load_review(p)?.full_text());
    }
    read_input(Path::new("-"))
}

fn review_text(map: &ReviewMap) -> String {
    let mut out = format!(
        "Review {} of {} ({}, rubric {})\n",
        map.id, map.work_id, map.reviewer_alias, map.rubric_id
    );
    for node in &map.nodes {
        match &node.body {
            NodeBody::Criterion {
                criterion_code,
                rating,
                narrative,
            } => {
                let rating = rating.map_or_else(|| "unrated".to_string(), |r| format!("{r}/5"));
                let _ = write!(out, "\n[{criterion_code}] {rating}\n{narrative}\n");
            }
            NodeBody::Overall { narrative, rating } => {
                let rating = rating.map_or_else(String::new, |r| format!(" {r}/5"));
                let _ = write!(out, "\n[overall]{rating}\n{narrative}\n");
            }
            NodeBody::Annotation { code, anchor, comment } => {
                let _ = write!(
                    out,
                    "\n[{code} @ section {} chars {}..{}]\n{comment}\n",
                    anchor.section_index, anchor.start_char, anchor.end_char
                );
            }
            NodeBody::Comment { text } => {
                let _ = write!(out, "\n[comment]\n{text}\n");
            }
        }
    }
    out
}

pub fn execute(command: Command, ctx: &Context) -> Result<String, CliError> {
    match command {
        Command::Review {
            work,
            rubric,
            parallelism,
            always_summarize,
            lenient,
        } => {
            let work = load_work(&work)?;
            let rubric = load_rubric(rubric.as_deref(), ctx)?;
            let mut cfg = ctx.config.pipeline.clone();
            if let Some(p) = parallelism {
                cfg.parallelism = p;
            }
            cfg.always_summarize |= always_summarize;
            cfg.lenient |= lenient;
            let backend = ctx.config.backend()?;
            let map = generate_ai_review(&work, &rubric, backend.as_ref(), &cfg).map_err(domain)?;
            Ok(match ctx.format {
                Format::Json => map.to_json(),
                Format::Text => review_text(&map),
            })
        }

        Command::ImportReview { corpus: root, review } => {
            let mut corpus = load_corpus(&root).map_err(storage_err)?;
            let map = load_review(&review)?;
            let work = corpus
                .work(&map.work_id)
                .ok_or_else(|| CliError::Domain(format!("review {} names unknown work {:?}", map.id, map.work_id)))?;
            let violations = validate_review_map(&map, work, &corpus.rubric);
            if !violations.is_empty() {
                return Err(CliError::Domain(format!(
                    "review failed validation:\n{}",
                    violation_lines(&[(map.id.clone(), violations)]).trim_end()
                )));
            }
            let id = map.id.clone();
            match corpus.reviews.iter_mut().find(|r| r.id == id) {
                Some(slot) => *slot = map,
                None => corpus.reviews.push(map),
            }
            let manifest = save_corpus(&corpus, &root).map_err(storage_err)?;
            Ok(match ctx.format {
                Format::Json => json(&manifest),
                Format::Text => format!(
                    "imported {id}; corpus now has {} reviews of {} works",
                    manifest.review_ids.len(),
                    manifest.work_ids.len()
                ),
            })
        }

        Command::Sentiment { input } => {
            let text = input_text(&input)?;
            let result = ctx.config.analyzer()?.analyze(&text);
            Ok(match ctx.format {
                Format::Json => json(&result),
                Format::Text => {
                    let mut out = format!(
                        "score {:.3}  magnitude {:.3}  category {}\n",
                        result.score,
                        result.magnitude,
                        json(&result.category).trim_matches('"')
                    );
                    for s in &result.sentences {
                        let _ = writeln!(out, "{:>7.3}  {}", s.score, s.text);
                    }
                    out
                }
            })
        }

        Command::Readability { input } => {
            let text = input_text(&input)?;
            let result = composite_grade(&text).map_err(domain)?;
            let stats = text_stats(&text);
            Ok(match ctx.format {
                Format::Json => json(&serde_json::json!({ "stats": stats, "grades": result })),
                Format::Text => format!(
                    "Flesch-Kincaid   {:>7.2}\nColeman-Liau     {:>7.2}\nARI              {:>7.2}\nComposite        {:>7.2}\n\
                     ({} words, {} sentences, {} syllables)\n",
                    result.fk, result.cl, result.ari, result.composite, stats.words, stats.sentences, stats.syllables
                ),
            })
        }

        Command::Compare {
            corpus: root,
            normalization,
        } => {
            let corpus = load_corpus(&root).map_err(storage_err)?;
            let mut options = ctx.config.analysis();
            if let Some(n) = normalization {
                options.normalization = n.mode();
            }
            let report = compare(&corpus, &ctx.config.analyzer()?, &options).map_err(domain)?;
            Ok(match ctx.format {
                Format::Json => report.to_json(),
                Format::Text => render_text(&report),
            })
        }

        Command::Report { input } => {
            let report: ComparisonReport = serde_json::from_str(&read_input(&input)?)
                .map_err(|e| CliError::Domain(format!("{}: {e}", input.display())))?;
            Ok(match ctx.format {
                Format::Json => report.to_json(),
                Format::Text => render_text(&report),
            })
        }

        Command::Demo {
            corpus: root,
            works,
            peer_reviews,
        } => {
            let rubric = load_rubric(None, ctx)?;
            let opts = SynthOptions {
                works,
                peer_reviews_per_work: peer_reviews,
                ..SynthOptions::default()
            };
            let backend = ctx.config.backend()?;
            let seed = ctx.seed.unwrap_or(DEFAULT_DEMO_SEED);
            let corpus =
                demo_corpus(seed, &opts, &rubric, backend.as_ref(), &ctx.config.pipeline).map_err(domain)?;
            let manifest = save_corpus(&corpus, &root).map_err(storage_err)?;
            Ok(match ctx.format {
                Format::Json => json(&manifest),
                Format::Text => format!(
                    "wrote {} works and {} reviews to {}",
                    manifest.work_ids.len(),
                    manifest.review_ids.len(),
                    root.display()
                ),
            })
        }

        Command::Validate {
            corpus,
            work,
            rubric,
            review,
        } => {
            if let Some(root) = corpus {
                let c = load_corpus(&root).map_err(storage_err)?;
                return Ok(format!("ok: {} works, {} reviews", c.works.len(), c.reviews.len()));
            }
            let mut lines = Vec::new();
            let rubric_value = match &rubric {
                Some(_) => {
                    let r = load_rubric(rubric.as_deref(), ctx)?;
                    lines.push(format!("ok: rubric {} ({} criteria)", r.id, r.criteria.len()));
                    Some(r)
                }
                None => None,
            };
            if let Some(path) = &work {
                let w = load_work(path)?;
                w.validate().map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
                lines.push(format!("ok: work {} ({} sections)", w.id, w.sections.len()));
                if let Some(rpath) = &review {
                    let map = load_review(rpath)?;
                    let r = match rubric_value {
                        Some(r) => r,
                        None => load_rubric(None, ctx)?,
                    };
                    let violations = validate_review_map(&map, &w, &r);
                    if !violations.is_empty() {
                        return Err(CliError::Domain(format!(
                            "review failed validation:\n{}",
                            violation_lines(&[(map.id.clone(), violations)]).trim_end()
                        )));
                    }
                    lines.push(format!("ok: review {} ({} nodes)", map.id, map.nodes.len()));
                }
            }
            if lines.is_empty() {
                return Err(CliError::Usage(
                    "validate needs --corpus, --work, --rubric or --work with --review".into(),
                ));
            }
            Ok(lines.join("\n"))
        }
    }
}
