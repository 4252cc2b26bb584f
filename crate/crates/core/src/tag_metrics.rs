//! Tag-set evaluation: precision, recall and F1 between predicted and gold
//! tags after stem normalization.
//!
//! * F1@K scores the first K distinct predictions in generation order.
//! * F1@M scores every distinct prediction (the model picks M).
//! * F1@O scores every distinct prediction of a run asked for exactly |gold|
//!   tags; the computation is the same as F1@M, only the label differs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gen_metrics::PRF;
use crate::report::MetricReport;
use crate::stemmer::{StemError, Stemmer};

#[derive(Debug, Error)]
pub enum TagMetricError {
    #[error(transparent)]
    Stem(#[from] StemError),
    #[error("no records to average")]
    EmptyInput,
    #[error("k must be at least 1")]
    InvalidK,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagEvalConfig {
    pub language: String,
    pub k_values: Vec<usize>,
    pub dedup: bool,
}

impl TagEvalConfig {
    pub fn new(language: impl Into<String>) -> Self {
        TagEvalConfig {
            language: language.into(),
            k_values: vec![3, 5],
            dedup: true,
        }
    }

    pub fn validate(&self) -> Result<(), TagMetricError> {
        if self.k_values.contains(&0) {
            return Err(TagMetricError::InvalidK);
        }
        Ok(())
    }
}

/// Normalizes every tag and drops empties and repeats, keeping first-seen order.
pub fn normalize_tags<S: AsRef<str>>(
    stemmer: &Stemmer,
    tags: &[S],
    language: &str,
    dedup: bool,
) -> Result<Vec<String>, StemError> {
    let mut out: Vec<String> = Vec::with_capacity(tags.len());
    for tag in tags {
        let norm = stemmer.normalize_tag(tag.as_ref(), language)?;
        if norm.is_empty() || (dedup && out.contains(&norm)) {
            continue;
        }
        out.push(norm);
    }
    Ok(out)
}

fn overlap(pred: &[String], gold: &[String]) -> usize {
    pred.iter().filter(|p| gold.contains(p)).count()
}

/// Scores tag predictions against a gold set for one record.
pub struct TagScorer<'a> {
    stemmer: &'a Stemmer,
    language: &'a str,
    dedup: bool,
}

impl<'a> TagScorer<'a> {
    pub fn new(stemmer: &'a Stemmer, language: &'a str) -> Self {
        TagScorer {
            stemmer,
            language,
            dedup: true,
        }
    }

    /// Keep repeated predictions; they then count against precision.
    pub fn keep_duplicates(mut self) -> Self {
        self.dedup = false;
        self
    }

    fn prepare<S: AsRef<str>, G: AsRef<str>>(
        &self,
        pred: &[S],
        gold: &[G],
    ) -> Result<(Vec<String>, Vec<String>), StemError> {
        Ok((
            normalize_tags(self.stemmer, pred, self.language, self.dedup)?,
            normalize_tags(self.stemmer, gold, self.language, true)?,
        ))
    }

    /// |normalized predictions ∩ normalized gold|.
    pub fn match_count<S: AsRef<str>, G: AsRef<str>>(&self, pred: &[S], gold: &[G]) -> Result<usize, StemError> {
        let (p, g) = self.prepare(pred, gold)?;
        Ok(overlap(&p, &g))
    }

    pub fn f1_at_k<S: AsRef<str>, G: AsRef<str>>(
        &self,
        pred: &[S],
        gold: &[G],
        k: usize,
    ) -> Result<PRF, TagMetricError> {
        if k == 0 {
            return Err(TagMetricError::InvalidK);
        }
        let (mut p, g) = self.prepare(pred, gold)?;
        p.truncate(k);
        Ok(PRF::from_counts(overlap(&p, &g), p.len(), g.len()))
    }

    pub fn f1_at_m<S: AsRef<str>, G: AsRef<str>>(&self, pred: &[S], gold: &[G]) -> Result<PRF, TagMetricError> {
        let (p, g) = self.prepare(pred, gold)?;
        Ok(PRF::from_counts(overlap(&p, &g), p.len(), g.len()))
    }

    pub fn f1_at_o<S: AsRef<str>, G: AsRef<str>>(&self, pred: &[S], gold: &[G]) -> Result<PRF, TagMetricError> {
        self.f1_at_m(pred, gold)
    }
}

/// Macro average of per-record scores under `label`, as `P@label`,
/// `R@label` and `F1@label` entries.
pub fn macro_report(label: &str, per_record: &[PRF]) -> Result<MetricReport, TagMetricError> {
    let mean = PRF::mean(per_record).ok_or(TagMetricError::EmptyInput)?;
    let mut report = MetricReport::new();
    report.insert(format!("P@{label}"), mean.precision);
    report.insert(format!("R@{label}"), mean.recall);
    report.insert(format!("F1@{label}"), mean.f1);
    Ok(report)
}

/// Per-record scores for every configured K plus M and O.
#[derive(Debug, Clone, Default)]
pub struct TagScores {
    pub at_k: Vec<(usize, PRF)>,
    pub at_m: PRF,
    pub at_o: PRF,
}

pub fn score_record<S: AsRef<str>, G: AsRef<str>>(
    stemmer: &Stemmer,
    config: &TagEvalConfig,
    pred: &[S],
    gold: &[G],
) -> Result<TagScores, TagMetricError> {
    config.validate()?;
    let mut scorer = TagScorer::new(stemmer, &config.language);
    if !config.dedup {
        scorer = scorer.keep_duplicates();
    }
    let at_k = config
        .k_values
        .iter()
        .map(|&k| Ok((k, scorer.f1_at_k(pred, gold, k)?)))
        .collect::<Result<_, TagMetricError>>()?;
    Ok(TagScores {
        at_k,
        at_m: scorer.f1_at_m(pred, gold)?,
        at_o: scorer.f1_at_o(pred, gold)?,
    })
}

/// Corpus report with `F1@3`, `F1@5`, `F1@M`, `F1@O` (and matching P/R).
pub fn corpus_report(config: &TagEvalConfig, records: &[TagScores]) -> Result<MetricReport, TagMetricError> {
    if records.is_empty() {
        return Err(TagMetricError::EmptyInput);
    }
    let mut report = MetricReport::new();
    for (i, &k) in config.k_values.iter().enumerate() {
        let col: Vec<PRF> = records.iter().map(|r| r.at_k[i].1).collect();
        report.extend(macro_report(&k.to_string(), &col)?);
    }
    let m: Vec<PRF> = records.iter().map(|r| r.at_m).collect();
    let o: Vec<PRF> = records.iter().map(|r| r.at_o).collect();
    report.extend(macro_report("M", &m)?);
    report.extend(macro_report("O", &o)?);
    Ok(report)
}
