//! Corpus-level BLEU.
//!
//! The pinned variant: case-sensitive whitespace tokenization, clipped
//! modified n-gram precisions for n = 1..4 with uniform weights, a single
//! reference per hypothesis, exponential brevity penalty, and corpus-level
//! aggregation of counts. Under plain scoring any zero precision makes the
//! score 0; the optional add-one smoothing (off by default) replaces each
//! higher-order precision with `(matches + 1) / (total + 1)` so tiny
//! corpora stay comparable. An order with no hypothesis n-grams at all
//! counts as vacuously perfect, so identical corpora score 100 whatever
//! their line lengths. Scores are reported on the 0..100 scale.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_NGRAM_ORDER: usize = 4;

/// Smoothing applied to the four n-gram precisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoothing {
    /// Plain scoring: a zero precision zeroes the whole score.
    #[default]
    None,
    /// `(m + 1) / (t + 1)` for orders 2..4; unigram precision is exact.
    AddOne,
}

/// Corpus-level BLEU with its components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BleuReport {
    /// 100 × brevity penalty × geometric mean of the four precisions.
    pub bleu: f64,
    /// Clipped modified n-gram precisions for n = 1..4, each in [0, 1].
    #[serde(rename = "precisions")]
    pub ngram_precisions: [f64; MAX_NGRAM_ORDER],
    /// `min(1, e^(1 - ref_len/hyp_len))`.
    #[serde(rename = "bp")]
    pub brevity_penalty: f64,
    #[serde(rename = "hyp_len")]
    pub hypothesis_length: usize,
    #[serde(rename = "ref_len")]
    pub reference_length: usize,
}

fn ngram_counts<'a>(tokens: &[&'a str], n: usize) -> HashMap<Vec<&'a str>, usize> {
    let mut counts = HashMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for window in tokens.windows(n) {
        *counts.entry(window.to_vec()).or_insert(0) += 1;
    }
    counts
}

/// Scores `hypotheses` against line-aligned single `references`.
pub fn corpus_bleu<H, R>(hypotheses: &[H], references: &[R]) -> Result<BleuReport>
where
    H: AsRef<str>,
    R: AsRef<str>,
{
    corpus_bleu_with(hypotheses, references, Smoothing::None)
}

/// [`corpus_bleu`] with an explicit smoothing choice.
pub fn corpus_bleu_with<H, R>(
    hypotheses: &[H],
    references: &[R],
    smoothing: Smoothing,
) -> Result<BleuReport>
where
    H: AsRef<str>,
    R: AsRef<str>,
{
    if hypotheses.len() != references.len() {
        return Err(Error::LineCountMismatch {
            hypotheses: hypotheses.len(),
            references: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let mut matches = [0usize; MAX_NGRAM_ORDER];
    let mut totals = [0usize; MAX_NGRAM_ORDER];
    let mut hyp_len = 0usize;
    let mut ref_len = 0usize;

    for (line, (hyp, reference)) in hypotheses.iter().zip(references).enumerate() {
        let hyp_tokens: Vec<&str> = hyp.as_ref().split_whitespace().collect();
        let ref_tokens: Vec<&str> = reference.as_ref().split_whitespace().collect();
        if ref_tokens.is_empty() {
            return Err(Error::EmptyReference { line: line + 1 });
        }
        hyp_len += hyp_tokens.len();
        ref_len += ref_tokens.len();
        for n in 1..=MAX_NGRAM_ORDER {
            if hyp_tokens.len() < n {
                continue;
            }
            totals[n - 1] += hyp_tokens.len() - n + 1;
            let ref_counts = ngram_counts(&ref_tokens, n);
            for (ngram, count) in ngram_counts(&hyp_tokens, n) {
                let clip = ref_counts.get(&ngram).copied().unwrap_or(0);
                matches[n - 1] += count.min(clip);
            }
        }
    }

    let mut precisions = [0.0f64; MAX_NGRAM_ORDER];
    for n in 1..=MAX_NGRAM_ORDER {
        let (m, t) = (matches[n - 1], totals[n - 1]);
        precisions[n - 1] = match smoothing {
            Smoothing::AddOne if n > 1 => (m + 1) as f64 / (t + 1) as f64,
            // No hypothesis n-grams of this order at all: vacuously
            // perfect, so identical corpora score 100 regardless of line
            // length. The empty-hypothesis case is caught by the brevity
            // penalty below.
            _ if t == 0 => 1.0,
            _ => m as f64 / t as f64,
        };
    }

    let brevity_penalty = if hyp_len == 0 {
        // Degenerate: every hypothesis line was empty. Score is 0.
        0.0
    } else if hyp_len >= ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };

    let bleu = if precisions.contains(&0.0) {
        0.0
    } else {
        let mean_log: f64 =
            precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_NGRAM_ORDER as f64;
        100.0 * brevity_penalty * mean_log.exp()
    };

    Ok(BleuReport {
        bleu,
        ngram_precisions: precisions,
        brevity_penalty,
        hypothesis_length: hyp_len,
        reference_length: ref_len,
    })
}
