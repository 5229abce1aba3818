use std::fmt::Write;

use super::stats::DescriptiveStats;
use super::tables::{ComparisonReport, CorpusSummary, ElementTable, KindPair};
use crate::corpus::ReportingElement;

/// Left-aligned first column, right-aligned others.
fn grid(title: &str, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let mut out = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(out, "{cell:<w$}");
            } else {
                let _ = write!(out, "  {cell:>w$}");
            }
        }
        out.trim_end().to_string()
    };
    let mut out = format!("{title}\n");
    let head: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    out += &line(&head);
    out.push('\n');
    let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len().saturating_sub(1));
    out += &"-".repeat(total);
    out.push('\n');
    for row in rows {
        out += &line(row);
        out.push('\n');
    }
    out
}

fn thousands(n: f64) -> String {
    let n = n.round() as i64;
    let digits = n.unsigned_abs().to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    if n < 0 {
        out.insert(0, '-');
    }
    out
}

fn two(x: f64) -> String {
    // Avoid printing "-0.00".
    let x = if x.abs() < 0.005 { 0.0 } else { x };
    format!("{x:.2}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), two)
}

fn summary_table(s: &CorpusSummary) -> String {
    let header = [
        "Group",
        "Works",
        "Work words",
        "Avg/work",
        "Peer reviews",
        "Peer words",
        "Avg/peer",
        "Peer/criterion",
        "AI reviews",
        "AI words",
        "Avg/AI",
        "AI/criterion",
    ];
    let rows: Vec<Vec<String>> = s
        .groups
        .iter()
        .chain(std::iter::once(&s.total))
        .map(|r| {
            vec![
                r.group.clone(),
                r.works.to_string(),
                thousands(r.work_words as f64),
                thousands(r.avg_work_words),
                r.peer_reviews.to_string(),
                thousands(r.peer_words as f64),
                thousands(r.avg_peer_words),
                format!("{:.1}", r.peer_words_per_criterion),
                r.ai_reviews.to_string(),
                thousands(r.ai_words as f64),
                thousands(r.avg_ai_words),
                format!("{:.1}", r.ai_words_per_criterion),
            ]
        })
        .collect();
    grid("Corpus extent", &header, &rows)
}

fn element_cells(t: &ElementTable, element: ReportingElement) -> Vec<String> {
    match t.rows.iter().find(|r| r.element == element) {
        Some(r) => vec![
            two(r.value),
            format!("{} ({})", two(r.median), two(r.sd)),
            opt(r.correlation),
            opt(r.covariance),
        ],
        None => vec!["n/a".into(), "n/a".into(), "n/a".into(), "n/a".into()],
    }
}

fn pair_table(title: &str, pair: &KindPair) -> String {
    let header = [
        "Element",
        "Human",
        "Median (SD)",
        "Corr.",
        "Cov.",
        "AI",
        "Median (SD)",
        "Corr.",
        "Cov.",
    ];
    let mut rows: Vec<Vec<String>> = ReportingElement::ALL
        .iter()
        .map(|&e| {
            let mut row = vec![e.name().to_string()];
            row.extend(element_cells(&pair.human, e));
            row.extend(element_cells(&pair.ai, e));
            row
        })
        .collect();
    let mut avg = vec!["Average".to_string(), two(pair.human.overall)];
    avg.extend(["".into(), "".into(), "".into()]);
    avg.push(two(pair.ai.overall));
    rows.push(avg);
    let title = format!(
        "{title} ({} human, {} AI reviews)",
        pair.human.reviews, pair.ai.reviews
    );
    grid(&title, &header, &rows)
}

fn readability_table(human: Option<&DescriptiveStats>, ai: Option<&DescriptiveStats>) -> String {
    let header = ["Reviews", "n", "Mean", "Median", "Maximum", "SD"];
    let row = |label: &str, d: Option<&DescriptiveStats>| match d {
        Some(d) => vec![
            label.to_string(),
            d.n.to_string(),
            two(d.mean),
            two(d.median),
            two(d.max),
            two(d.sd),
        ],
        None => vec![label.to_string(), "0".into(), "n/a".into(), "n/a".into(), "n/a".into(), "n/a".into()],
    };
    grid(
        "Readability (composite grade level)",
        &header,
        &[row("Human", human), row("AI", ai)],
    )
}

/// Plain-text rendering: corpus extent, ratings, readability, sentiment
/// score and sentiment magnitude, in that order.
pub fn render_text(report: &ComparisonReport) -> String {
    [
        summary_table(&report.summary),
        pair_table("Ratings by element", &report.ratings),
        readability_table(report.readability.human.as_ref(), report.readability.ai.as_ref()),
        pair_table("Sentiment score by element", &report.sentiment_score),
        pair_table("Sentiment magnitude by element", &report.sentiment_magnitude),
    ]
    .join("\n")
}
