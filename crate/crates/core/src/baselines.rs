//! Extractive headline baselines.

use crate::corpus::ArticleRecord;
use crate::gen_metrics::{rouge_n, SubwordVocab};
use crate::segmenter::{SegmentError, Segmenter};

/// First sentence of the body.
pub fn lead_1(record: &ArticleRecord, segmenter: &Segmenter) -> Result<String, SegmentError> {
    let spans = segmenter.segment(&record.body, &record.language)?;
    Ok(spans.into_iter().next().map(|s| s.text).unwrap_or_default())
}

/// Index and ROUGE-2 F1 of the body sentence closest to the reference
/// headline over subword tokens. Earliest sentence wins ties.
pub fn ext_oracle_pick(
    record: &ArticleRecord,
    segmenter: &Segmenter,
    vocab: &SubwordVocab,
) -> Result<Option<(usize, String, f64)>, SegmentError> {
    let spans = segmenter.segment(&record.body, &record.language)?;
    let reference = vocab.tokenize(&record.headline);
    let mut best: Option<(usize, String, f64)> = None;
    for (i, span) in spans.into_iter().enumerate() {
        let f1 = rouge_n(&vocab.tokenize(&span.text), &reference, 2).f1;
        if best.as_ref().is_none_or(|b| f1 > b.2) {
            best = Some((i, span.text, f1));
        }
    }
    Ok(best)
}

pub fn ext_oracle(record: &ArticleRecord, segmenter: &Segmenter, vocab: &SubwordVocab) -> Result<String, SegmentError> {
    Ok(ext_oracle_pick(record, segmenter, vocab)?
        .map(|b| b.1)
        .unwrap_or_default())
}
