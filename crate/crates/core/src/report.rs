//! Scored experimental conditions and report rendering.
//!
//! Every scored condition carries the coordinates needed to re-run it
//! byte-identically: seed, mixture or noise probability, lexicon digest,
//! and backend identity. JSON reports keep full precision; text tables
//! round to two decimals.

use serde::Serialize;

use crate::bleu::{corpus_bleu, BleuReport};
use crate::error::Result;

/// Reproducibility metadata for one experimental condition.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionMeta {
    pub name: String,
    /// Natural-noise injection probability, for sweep conditions.
    pub noise_probability: Option<f64>,
    /// Measured fraction of tokens actually replaced, for sweep conditions.
    pub noised_token_fraction: Option<f64>,
    /// Synthetic mixture configuration string, for plan conditions.
    pub mixture: Option<String>,
    pub seed: u64,
    /// Content digest of the error lexicon, when one was used.
    pub lexicon_sha256: Option<String>,
    /// Backend identity, e.g. `identity` or `subprocess:<command>`.
    pub backend: String,
}

impl ConditionMeta {
    pub fn new(name: impl Into<String>, seed: u64, backend: impl Into<String>) -> Self {
        ConditionMeta {
            name: name.into(),
            noise_probability: None,
            noised_token_fraction: None,
            mixture: None,
            seed,
            lexicon_sha256: None,
            backend: backend.into(),
        }
    }
}

/// One evaluated condition: metadata, its BLEU report, and the delta
/// against the run's baseline when one is designated.
#[derive(Debug, Clone, Serialize)]
pub struct ScoredCondition {
    #[serde(flatten)]
    pub meta: ConditionMeta,
    pub bleu: f64,
    /// `bleu - baseline bleu`, absent for baseline rows themselves.
    pub delta: Option<f64>,
    pub report: BleuReport,
}

impl ScoredCondition {
    /// Sets `delta = bleu - baseline`.
    pub fn with_baseline(mut self, baseline: f64) -> Self {
        self.delta = Some(self.bleu - baseline);
        self
    }
}

/// Scores translations against references and attaches condition
/// metadata. When `baseline` is given the delta is `bleu - baseline`.
pub fn score_condition<H, R>(
    translations: &[H],
    references: &[R],
    meta: ConditionMeta,
    baseline: Option<f64>,
) -> Result<ScoredCondition>
where
    H: AsRef<str>,
    R: AsRef<str>,
{
    let report = corpus_bleu(translations, references)?;
    let bleu = report.bleu;
    Ok(ScoredCondition {
        meta,
        bleu,
        delta: baseline.map(|b| bleu - b),
        report,
    })
}

/// A condition that could not be scored, with its diagnostic.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionFailure {
    pub name: String,
    pub error: String,
}

/// The serializable result of a sweep or ablation run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub conditions: Vec<ScoredCondition>,
    pub failures: Vec<ConditionFailure>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

fn fmt_opt_percent(value: Option<f64>) -> String {
    value.map_or(String::new(), |v| format!("{:.2}%", v * 100.0))
}

fn fmt_opt_score(value: Option<f64>) -> String {
    value.map_or(String::new(), |v| format!("{v:.2}"))
}

/// Renders rows as space-aligned columns: the first column left-aligned,
/// the rest right-aligned, two spaces between columns.
fn render_columns(header: &[&str], rows: &[Vec<String>]) -> String {
    let columns = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut push_row = |cells: Vec<String>| {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            let pad = widths[i] - cell.chars().count();
            if i == 0 {
                line.push_str(cell);
                if i + 1 < columns {
                    line.extend(std::iter::repeat(' ').take(pad));
                }
            } else {
                line.extend(std::iter::repeat(' ').take(pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    };
    push_row(header.iter().map(|h| h.to_string()).collect());
    for row in rows {
        push_row(row.clone());
    }
    out
}

/// Text table for a natural-noise sweep: one row per probability level
/// with the measured noised-token fraction, BLEU, and delta.
pub fn render_sweep_table(conditions: &[ScoredCondition]) -> String {
    let header = ["Condition", "Noise Probability", "Noised Tokens", "BLEU", "Delta"];
    let rows: Vec<Vec<String>> = conditions
        .iter()
        .map(|c| {
            vec![
                c.meta.name.clone(),
                fmt_opt_percent(c.meta.noise_probability),
                fmt_opt_percent(c.meta.noised_token_fraction),
                format!("{:.2}", c.bleu),
                fmt_opt_score(c.delta),
            ]
        })
        .collect();
    render_columns(&header, &rows)
}

/// Text table for an ablation run: condition label, BLEU, and delta, with
/// blank delta cells on the baseline rows.
pub fn render_ablation_table(conditions: &[ScoredCondition]) -> String {
    let header = ["Training Noise", "BLEU", "Delta"];
    let rows: Vec<Vec<String>> = conditions
        .iter()
        .map(|c| {
            vec![
                c.meta.name.clone(),
                format!("{:.2}", c.bleu),
                fmt_opt_score(c.delta),
            ]
        })
        .collect();
    render_columns(&header, &rows)
}
