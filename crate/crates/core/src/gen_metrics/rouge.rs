use std::collections::HashMap;
use std::hash::Hash;

use super::PRF;

fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    if n > 0 && tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// ROUGE-N with clipped n-gram overlap. `n == 0` scores zero.
pub fn rouge_n<T: Eq + Hash>(hyp: &[T], reference: &[T], n: usize) -> PRF {
    let hyp_counts = ngram_counts(hyp, n);
    let ref_counts = ngram_counts(reference, n);
    let overlap: usize = hyp_counts
        .iter()
        .map(|(gram, &c)| c.min(ref_counts.get(gram).copied().unwrap_or(0)))
        .sum();
    let total = |tokens: &[T]| {
        if n == 0 {
            0
        } else {
            (tokens.len() + 1).saturating_sub(n)
        }
    };
    PRF::from_counts(overlap, total(hyp), total(reference))
}

/// Length of the longest common subsequence, in O(|a|·|b|) time and
/// O(min(|a|,|b|)) memory.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut row = vec![0usize; short.len() + 1];
    for x in long {
        let mut diag = 0;
        for (j, y) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[short.len()]
}

/// Sentence-level ROUGE-L over the full token lists.
pub fn rouge_l<T: PartialEq>(hyp: &[T], reference: &[T]) -> PRF {
    PRF::from_counts(lcs_len(hyp, reference), hyp.len(), reference.len())
}
