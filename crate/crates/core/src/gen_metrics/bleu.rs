use std::collections::HashMap;
use std::hash::Hash;

use super::MetricError;

/// Replaces a zero modified precision before taking logs.
pub const BLEU_EPSILON: f64 = 1e-9;

/// Corpus BLEU with brevity penalty and uniform weights over orders
/// `1..=max_n`. Counts are pooled over all segments before the precisions are
/// formed; an order with no clipped matches contributes [`BLEU_EPSILON`].
pub fn corpus_bleu<T: Eq + Hash>(hyps: &[Vec<T>], refs: &[Vec<T>], max_n: usize) -> Result<f64, MetricError> {
    if hyps.len() != refs.len() {
        return Err(MetricError::LengthMismatch {
            hyps: hyps.len(),
            refs: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mut matches = vec![0usize; max_n];
    let mut totals = vec![0usize; max_n];
    let (mut hyp_len, mut ref_len) = (0usize, 0usize);
    for (h, r) in hyps.iter().zip(refs) {
        hyp_len += h.len();
        ref_len += r.len();
        for n in 1..=max_n {
            if h.len() < n {
                continue;
            }
            let mut ref_counts: HashMap<&[T], usize> = HashMap::new();
            if r.len() >= n {
                for g in r.windows(n) {
                    *ref_counts.entry(g).or_insert(0) += 1;
                }
            }
            let mut hyp_counts: HashMap<&[T], usize> = HashMap::new();
            for g in h.windows(n) {
                *hyp_counts.entry(g).or_insert(0) += 1;
            }
            totals[n - 1] += h.len() + 1 - n;
            matches[n - 1] += hyp_counts
                .iter()
                .map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
                .sum::<usize>();
        }
    }
    if hyp_len == 0 || max_n == 0 {
        return Ok(0.0);
    }
    let log_precision: f64 = matches
        .iter()
        .zip(&totals)
        .map(|(&m, &t)| {
            if m == 0 {
                BLEU_EPSILON.ln()
            } else {
                (m as f64 / t as f64).ln()
            }
        })
        .sum::<f64>()
        / max_n as f64;
    let brevity = if hyp_len >= ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };
    Ok(brevity * log_precision.exp())
}
