//! Headline quality metrics computed over subword tokens.

mod bleu;
mod rouge;
mod subword;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::MetricReport;

pub use bleu::{corpus_bleu, BLEU_EPSILON};
pub use rouge::{lcs_len, rouge_l, rouge_n};
pub use subword::{SubwordVocab, VocabError};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("hypothesis and reference counts differ: {hyps} vs {refs}")]
    LengthMismatch { hyps: usize, refs: usize },
    #[error("no segments to score")]
    EmptyCorpus,
    #[error("reference has no tokens")]
    EmptyReference,
}

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PRF {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PRF {
    pub const ZERO: PRF = PRF {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };

    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        PRF { precision, recall, f1 }
    }

    /// From an overlap count and the sizes of the predicted and gold sides.
    /// A zero denominator gives zero for that component.
    pub fn from_counts(overlap: usize, predicted: usize, gold: usize) -> Self {
        let ratio = |d: usize| if d == 0 { 0.0 } else { overlap as f64 / d as f64 };
        PRF::new(ratio(predicted), ratio(gold))
    }

    /// Component-wise arithmetic mean. `None` for an empty input.
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a PRF>) -> Option<PRF> {
        let mut n = 0usize;
        let mut acc = PRF::ZERO;
        for p in items {
            n += 1;
            acc.precision += p.precision;
            acc.recall += p.recall;
            acc.f1 += p.f1;
        }
        (n > 0).then(|| PRF {
            precision: acc.precision / n as f64,
            recall: acc.recall / n as f64,
            f1: acc.f1 / n as f64,
        })
    }
}

/// `|hyp| / |ref|` in tokens.
pub fn length_ratio<T>(hyp: &[T], reference: &[T]) -> Result<f64, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    Ok(hyp.len() as f64 / reference.len() as f64)
}

/// Corpus scores for generated headlines over subword tokens: mean ROUGE-1,
/// ROUGE-2 and ROUGE-L F1, corpus BLEU-4 and mean length ratio.
pub fn headline_report<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
    vocab: &SubwordVocab,
) -> Result<MetricReport, MetricError> {
    if hyps.len() != refs.len() {
        return Err(MetricError::LengthMismatch {
            hyps: hyps.len(),
            refs: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let h: Vec<Vec<String>> = hyps.iter().map(|t| vocab.tokenize(t.as_ref())).collect();
    let r: Vec<Vec<String>> = refs.iter().map(|t| vocab.tokenize(t.as_ref())).collect();
    let n = h.len() as f64;
    let mut sums = [0.0f64; 4];
    for (hy, re) in h.iter().zip(&r) {
        sums[0] += rouge_n(hy, re, 1).f1;
        sums[1] += rouge_n(hy, re, 2).f1;
        sums[2] += rouge_l(hy, re).f1;
        sums[3] += length_ratio(hy, re)?;
    }
    let mut report = MetricReport::new();
    report.insert("ROUGE-1", sums[0] / n);
    report.insert("ROUGE-2", sums[1] / n);
    report.insert("ROUGE-L", sums[2] / n);
    report.insert("BLEU", corpus_bleu(&h, &r, 4)?);
    report.insert("LR", sums[3] / n);
    Ok(report)
}
