use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stats::{self, covariance, describe, pearson, DescriptiveStats, NormalizationMode};
use super::AnalyticsError;
use crate::corpus::{ReportingElement, ReviewCorpus, ReviewKind, ReviewMap};
use crate::readability::composite_grade;
use crate::sentiment::SentimentAnalyzer;

/// Per-criterion word averages divide the per-review average by this.
pub const WORDS_PER_CRITERION_DIVISOR: f64 = 8.0;

const UNGROUPED: &str = "(no course)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Rating,
    SentimentScore,
    SentimentMagnitude,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Rating, Metric::SentimentScore, Metric::SentimentMagnitude];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisOptions {
    /// Rescaling applied before correlation and covariance; `None` uses raw
    /// values. Means, medians and SDs are always raw.
    pub normalization: Option<NormalizationMode>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            normalization: Some(NormalizationMode::MinMax),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementStatsRow {
    pub element: ReportingElement,
    /// Reviews contributing a value for this element.
    pub n: usize,
    pub value: f64,
    pub median: f64,
    pub sd: f64,
    /// `None` when undefined (constant values or fewer than two pairs).
    pub correlation: Option<f64>,
    pub covariance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementTable {
    pub kind: ReviewKind,
    pub metric: Metric,
    pub reviews: usize,
    pub rows: Vec<ElementStatsRow>,
    /// Mean of the row values.
    pub overall: f64,
}

pub fn overall_average(element_values: &[f64]) -> f64 {
    if element_values.is_empty() {
        0.0
    } else {
        element_values.iter().sum::<f64>() / element_values.len() as f64
    }
}

fn metric_value(
    metric: Metric,
    rating: Option<u8>,
    narrative: &str,
    analyzer: &dyn SentimentAnalyzer,
) -> Option<f64> {
    match metric {
        Metric::Rating => rating.map(f64::from),
        _ if narrative.trim().is_empty() => None,
        Metric::SentimentScore => Some(analyzer.analyze(narrative).score),
        Metric::SentimentMagnitude => Some(analyzer.analyze(narrative).magnitude),
    }
}

/// Element value per element for one review: mean over that element's
/// criteria which carry a value.
fn review_elements(
    corpus: &ReviewCorpus,
    review: &ReviewMap,
    metric: Metric,
    analyzer: &dyn SentimentAnalyzer,
) -> BTreeMap<ReportingElement, f64> {
    let mut acc: BTreeMap<ReportingElement, (f64, usize)> = BTreeMap::new();
    for entry in review.criterion_entries() {
        let Some(criterion) = corpus.rubric.criterion(entry.code) else {
            continue;
        };
        if let Some(v) = metric_value(metric, entry.rating, entry.narrative, analyzer) {
            let slot = acc.entry(criterion.element).or_default();
            slot.0 += v;
            slot.1 += 1;
        }
    }
    acc.into_iter().map(|(e, (sum, n))| (e, sum / n as f64)).collect()
}

pub fn element_table(
    corpus: &ReviewCorpus,
    kind: ReviewKind,
    metric: Metric,
    analyzer: &dyn SentimentAnalyzer,
    options: &AnalysisOptions,
) -> Result<ElementTable, AnalyticsError> {
    let reviews: Vec<&ReviewMap> = corpus.reviews_of_kind(kind).collect();
    if reviews.len() < 2 {
        return Err(AnalyticsError::InsufficientData(format!(
            "{} {kind} review(s); need at least 2",
            reviews.len()
        )));
    }
    let per_review: Vec<BTreeMap<ReportingElement, f64>> = reviews
        .iter()
        .map(|r| review_elements(corpus, r, metric, analyzer))
        .collect();
    let overall_per_review: Vec<Option<f64>> = per_review
        .iter()
        .map(|m| (!m.is_empty()).then(|| stats::mean(&m.values().copied().collect::<Vec<_>>())))
        .collect();

    // One transform for the whole dataset so element and overall values
    // stay on the same scale.
    let pooled: Vec<f64> = per_review.iter().flat_map(|m| m.values().copied()).collect();
    let (min, max) = stats::min_max(&pooled).unwrap_or((0.0, 0.0));
    let rescale = |x: f64| match options.normalization {
        Some(mode) => stats::rescale(x, min, max, mode),
        None => x,
    };

    let mut rows = Vec::new();
    for element in ReportingElement::ALL {
        let mut values = Vec::new();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (m, overall) in per_review.iter().zip(&overall_per_review) {
            if let (Some(&v), Some(o)) = (m.get(&element), overall) {
                values.push(v);
                xs.push(rescale(v));
                ys.push(rescale(*o));
            }
        }
        if values.is_empty() {
            continue;
        }
        let d: DescriptiveStats = describe(&values)?;
        rows.push(ElementStatsRow {
            element,
            n: d.n,
            value: d.mean,
            median: d.median,
            sd: d.sd,
            correlation: pearson(&xs, &ys).ok(),
            covariance: covariance(&xs, &ys).ok(),
        });
    }
    let overall = overall_average(&rows.iter().map(|r| r.value).collect::<Vec<_>>());
    Ok(ElementTable {
        kind,
        metric,
        reviews: reviews.len(),
        rows,
        overall,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub group: String,
    pub works: usize,
    pub work_words: usize,
    pub avg_work_words: f64,
    pub peer_reviews: usize,
    pub peer_words: usize,
    pub avg_peer_words: f64,
    pub peer_words_per_criterion: f64,
    pub ai_reviews: usize,
    pub ai_words: usize,
    pub avg_ai_words: f64,
    pub ai_words_per_criterion: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub groups: Vec<SummaryRow>,
    /// Counts and words are summed over groups; averages are the mean of
    /// the group averages, over groups that have any of that item.
    pub total: SummaryRow,
}

fn ratio(total: usize, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        total as f64 / count as f64
    }
}

fn mean_of_present(rows: &[SummaryRow], count: fn(&SummaryRow) -> usize, avg: fn(&SummaryRow) -> f64) -> f64 {
    let present: Vec<f64> = rows.iter().filter(|r| count(r) > 0).map(avg).collect();
    overall_average(&present)
}

/// Word counts grouped by course. Reviews of unknown works are ignored;
/// only peer and AI reviews are counted.
pub fn corpus_summary(corpus: &ReviewCorpus) -> CorpusSummary {
    let mut groups: BTreeMap<String, SummaryRow> = BTreeMap::new();
    let group_of = |course: &Option<String>| course.clone().unwrap_or_else(|| UNGROUPED.to_string());
    for w in &corpus.works {
        let row = groups.entry(group_of(&w.course)).or_default();
        row.works += 1;
        row.work_words += w.word_count();
    }
    for r in &corpus.reviews {
        let Some(w) = corpus.work(&r.work_id) else {
            continue;
        };
        let row = groups.entry(group_of(&w.course)).or_default();
        match r.kind {
            ReviewKind::Peer => {
                row.peer_reviews += 1;
                row.peer_words += r.word_count();
            }
            ReviewKind::Ai => {
                row.ai_reviews += 1;
                row.ai_words += r.word_count();
            }
            _ => {}
        }
    }
    let groups: Vec<SummaryRow> = groups
        .into_iter()
        .map(|(group, mut row)| {
            row.group = group;
            row.avg_work_words = ratio(row.work_words, row.works);
            row.avg_peer_words = ratio(row.peer_words, row.peer_reviews);
            row.avg_ai_words = ratio(row.ai_words, row.ai_reviews);
            row.peer_words_per_criterion = row.avg_peer_words / WORDS_PER_CRITERION_DIVISOR;
            row.ai_words_per_criterion = row.avg_ai_words / WORDS_PER_CRITERION_DIVISOR;
            row
        })
        .collect();

    let sum = |f: fn(&SummaryRow) -> usize| groups.iter().map(f).sum::<usize>();
    let avg_peer = mean_of_present(&groups, |r| r.peer_reviews, |r| r.avg_peer_words);
    let avg_ai = mean_of_present(&groups, |r| r.ai_reviews, |r| r.avg_ai_words);
    let total = SummaryRow {
        group: "Total".to_string(),
        works: sum(|r| r.works),
        work_words: sum(|r| r.work_words),
        avg_work_words: mean_of_present(&groups, |r| r.works, |r| r.avg_work_words),
        peer_reviews: sum(|r| r.peer_reviews),
        peer_words: sum(|r| r.peer_words),
        avg_peer_words: avg_peer,
        peer_words_per_criterion: avg_peer / WORDS_PER_CRITERION_DIVISOR,
        ai_reviews: sum(|r| r.ai_reviews),
        ai_words: sum(|r| r.ai_words),
        avg_ai_words: avg_ai,
        ai_words_per_criterion: avg_ai / WORDS_PER_CRITERION_DIVISOR,
    };
    CorpusSummary { groups, total }
}

/// Human (peer) and AI versions of one element table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindPair {
    pub human: ElementTable,
    pub ai: ElementTable,
}

/// Composite readability grade of review texts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadabilityPair {
    pub human: Option<DescriptiveStats>,
    pub ai: Option<DescriptiveStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub summary: CorpusSummary,
    pub ratings: KindPair,
    pub readability: ReadabilityPair,
    pub sentiment_score: KindPair,
    pub sentiment_magnitude: KindPair,
}

fn readability_of(corpus: &ReviewCorpus, kind: ReviewKind) -> Option<DescriptiveStats> {
    let grades: Vec<f64> = corpus
        .reviews_of_kind(kind)
        .filter_map(|r| composite_grade(&r.full_text()).ok())
        .map(|g| g.composite)
        .collect();
    describe(&grades).ok()
}

/// Everything in one report. Human means peer reviews.
pub fn compare(
    corpus: &ReviewCorpus,
    analyzer: &dyn SentimentAnalyzer,
    options: &AnalysisOptions,
) -> Result<ComparisonReport, AnalyticsError> {
    for kind in [ReviewKind::Peer, ReviewKind::Ai] {
        if corpus.reviews_of_kind(kind).next().is_none() {
            return Err(AnalyticsError::InsufficientData(format!("corpus has no {kind} reviews")));
        }
    }
    let pair = |metric| -> Result<KindPair, AnalyticsError> {
        Ok(KindPair {
            human: element_table(corpus, ReviewKind::Peer, metric, analyzer, options)?,
            ai: element_table(corpus, ReviewKind::Ai, metric, analyzer, options)?,
        })
    };
    Ok(ComparisonReport {
        summary: corpus_summary(corpus),
        ratings: pair(Metric::Rating)?,
        readability: ReadabilityPair {
            human: readability_of(corpus, ReviewKind::Peer),
            ai: readability_of(corpus, ReviewKind::Ai),
        },
        sentiment_score: pair(Metric::SentimentScore)?,
        sentiment_magnitude: pair(Metric::SentimentMagnitude)?,
    })
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{default_rubric, parse_work, Node, NodeBody, Work};
    use crate::sentiment::LexiconAnalyzer;

    fn work(id: &str, course: Option<&str>, words: usize) -> Work {
        let mut w = parse_work(&format!("# Body\n\n{}", vec!["word"; words].join(" "))).unwrap();
        w.id = id.to_string();
        w.course = course.map(str::to_string);
        w
    }

    fn review(id: &str, work_id: &str, kind: ReviewKind, ratings: &dyn Fn(usize) -> u8, narrative: &str) -> ReviewMap {
        let rubric = default_rubric();
        ReviewMap {
            id: id.to_string(),
            work_id: work_id.to_string(),
            rubric_id: rubric.id.clone(),
            kind,
            reviewer_alias: id.to_string(),
            nodes: rubric
                .criteria
                .iter()
                .enumerate()
                .map(|(i, c)| Node {
                    id: format!("{id}-{i}"),
                    body: NodeBody::Criterion {
                        criterion_code: c.code.clone(),
                        rating: Some(ratings(i)),
                        narrative: narrative.to_string(),
                    },
                })
                .collect(),
            edges: vec![],
        }
    }

    fn corpus(reviews: Vec<ReviewMap>) -> ReviewCorpus {
        ReviewCorpus {
            works: vec![work("w1", Some("A"), 10)],
            reviews,
            rubric: default_rubric(),
        }
    }

    #[test]
    fn constant_corpus_has_undefined_correlation() {
        let c = corpus(
            (0..4)
                .map(|i| review(&format!("p{i}"), "w1", ReviewKind::Peer, &|_| 4, "Fine."))
                .collect(),
        );
        let t = element_table(&c, ReviewKind::Peer, Metric::Rating, &LexiconAnalyzer::default(), &AnalysisOptions::default())
            .unwrap();
        assert_eq!(t.rows.len(), 5);
        for row in &t.rows {
            assert_eq!((row.value, row.median, row.sd), (4.0, 4.0, 0.0));
            assert_eq!(row.correlation, None);
            assert_eq!(row.covariance, Some(0.0));
        }
        assert_eq!(t.overall, 4.0);
    }

    #[test]
    fn element_values_average_their_criteria() {
        // Criterion i gets rating 1 + i % 5; varying per review by an offset.
        let reviews = (0..3)
            .map(|k| {
                review(&format!("p{k}"), "w1", ReviewKind::Peer, &move |i| (1 + (i + k) % 5) as u8, "")
            })
            .collect();
        let c = corpus(reviews);
        let t = element_table(&c, ReviewKind::Peer, Metric::Rating, &LexiconAnalyzer::default(), &AnalysisOptions { normalization: None })
            .unwrap();
        // Hand-computed from the default rubric's criterion order (two per
        // element, communication last).
        let per_review = |k: usize| -> Vec<f64> {
            let r: Vec<f64> = (0..9).map(|i| (1 + (i + k) % 5) as f64).collect();
            vec![(r[0] + r[1]) / 2.0, (r[2] + r[3]) / 2.0, (r[4] + r[5]) / 2.0, (r[6] + r[7]) / 2.0, r[8]]
        };
        for (e, row) in t.rows.iter().enumerate() {
            let vals: Vec<f64> = (0..3).map(|k| per_review(k)[e]).collect();
            assert!((row.value - vals.iter().sum::<f64>() / 3.0).abs() < 1e-12);
            assert!(row.correlation.is_none_or(|r| (-1.0..=1.0).contains(&r)));
        }
        let mean_rows = t.rows.iter().map(|r| r.value).sum::<f64>() / 5.0;
        assert!((t.overall - mean_rows).abs() < 1e-9);
    }

    #[test]
    fn normalization_does_not_move_correlation() {
        let reviews = (0..6)
            .map(|k| review(&format!("p{k}"), "w1", ReviewKind::Peer, &move |i| (1 + (i * k + k) % 5) as u8, ""))
            .collect();
        let c = corpus(reviews);
        let a = LexiconAnalyzer::default();
        let raw = element_table(&c, ReviewKind::Peer, Metric::Rating, &a, &AnalysisOptions { normalization: None }).unwrap();
        for mode in [NormalizationMode::MinMax, NormalizationMode::RangeDivide] {
            let n = element_table(&c, ReviewKind::Peer, Metric::Rating, &a, &AnalysisOptions { normalization: Some(mode) })
                .unwrap();
            for (x, y) in raw.rows.iter().zip(&n.rows) {
                assert_eq!(x.value, y.value);
                match (x.correlation, y.correlation) {
                    (Some(p), Some(q)) => assert!((p - q).abs() < 1e-9),
                    (p, q) => assert_eq!(p, q),
                }
            }
        }
    }

    #[test]
    fn insufficient_reviews() {
        let c = corpus(vec![review("p0", "w1", ReviewKind::Peer, &|_| 3, "")]);
        let a = LexiconAnalyzer::default();
        assert!(matches!(
            element_table(&c, ReviewKind::Peer, Metric::Rating, &a, &AnalysisOptions::default()),
            Err(AnalyticsError::InsufficientData(_))
        ));
        let only_ai = corpus(
            (0..3)
                .map(|i| review(&format!("a{i}"), "w1", ReviewKind::Ai, &|_| 3, "Good."))
                .collect(),
        );
        assert!(matches!(compare(&only_ai, &a, &AnalysisOptions::default()), Err(AnalyticsError::InsufficientData(_))));
    }

    #[test]
    fn published_overall_averages() {
        let cases: [(&[f64], f64); 6] = [
            (&[3.54, 4.01, 3.77, 3.83, 3.97], 3.82),
            (&[3.00, 3.13, 3.10, 3.19, 3.48], 3.18),
            (&[0.24, 0.43, 0.25, 0.33, 0.40], 0.33),
            (&[0.19, 0.28, 0.23, 0.20, 0.20], 0.22),
            (&[0.89, 1.09, 0.93, 0.90, 1.58], 1.08),
            (&[3.83, 3.48, 2.57, 2.62, 2.45], 2.99),
        ];
        for (means, printed) in cases {
            assert!((overall_average(means) - printed).abs() <= 0.005, "{means:?}");
        }
    }

    #[test]
    fn summary_groups_and_totals() {
        let mut c = corpus(vec![
            review("p0", "w1", ReviewKind::Peer, &|_| 3, "one two"),
            review("a0", "w2", ReviewKind::Ai, &|_| 3, "one two three"),
            review("s0", "w1", ReviewKind::SelfReview, &|_| 3, "ignored words here"),
            review("x0", "missing", ReviewKind::Peer, &|_| 3, "ignored"),
        ]);
        c.works.push(work("w2", Some("B"), 30));
        c.works.push(work("w3", Some("B"), 10));
        let s = corpus_summary(&c);
        assert_eq!(s.groups.len(), 2);
        let (a, b) = (&s.groups[0], &s.groups[1]);
        // Headings are not counted as work words.
        assert_eq!((a.group.as_str(), a.works, a.work_words), ("A", 1, 10));
        assert_eq!((b.works, b.work_words, b.avg_work_words), (2, 40, 20.0));
        assert_eq!((a.peer_reviews, a.peer_words, a.ai_reviews), (1, 18, 0));
        assert_eq!((b.ai_reviews, b.ai_words), (1, 27));
        assert_eq!(s.total.works, 3);
        assert_eq!(s.total.avg_work_words, (10.0 + 20.0) / 2.0);
        // Only group A has peer reviews, only B has AI reviews.
        assert_eq!(s.total.avg_peer_words, 18.0);
        assert_eq!(s.total.ai_words_per_criterion, 27.0 / 8.0);
    }

    #[test]
    fn empty_corpus_summary_is_zero() {
        let c = ReviewCorpus { works: vec![], reviews: vec![], rubric: default_rubric() };
        let s = corpus_summary(&c);
        assert!(s.groups.is_empty());
        assert_eq!(s.total, SummaryRow { group: "Total".into(), ..Default::default() });
    }

    #[test]
    fn compare_assembles_everything() {
        let mut reviews: Vec<ReviewMap> = (0..3)
            .map(|k| review(&format!("p{k}"), "w1", ReviewKind::Peer, &move |i| (1 + (i + k) % 5) as u8, "Clear and thoughtful work. Some claims are vague."))
            .collect();
        reviews.extend((0..3).map(|k| {
            review(&format!("a{k}"), "w1", ReviewKind::Ai, &move |i| (2 + (i * k) % 4) as u8, "The essay is excellent. The structure could be stronger.")
        }));
        let c = corpus(reviews);
        let r = compare(&c, &LexiconAnalyzer::new(crate::sentiment::Lexicon::starter()), &AnalysisOptions::default()).unwrap();
        assert_eq!(r.ratings.human.reviews, 3);
        assert_eq!(r.sentiment_magnitude.ai.kind, ReviewKind::Ai);
        assert_eq!(r.readability.human.unwrap().n, 3);
        assert!(r.sentiment_score.human.overall > 0.0);
        let back: ComparisonReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
