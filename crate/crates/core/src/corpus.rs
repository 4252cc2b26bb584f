//! Corpus records, line-delimited JSON ingestion, per-language splitting and
//! dataset statistics.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::gen_metrics::SubwordVocab;
use crate::lang;
use crate::segmenter::{SegmentError, Segmenter};
use crate::stemmer::{StemError, Stemmer};
use crate::tag_metrics::normalize_tags;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {0}: malformed record: {1}")]
    MalformedLine(usize, String),
    #[error("line {1}: missing field {0:?}")]
    MissingField(&'static str, usize),
    #[error("line {1}: field {0:?} is empty")]
    EmptyField(&'static str, usize),
    #[error("line {1}: unsupported language {0:?}")]
    UnsupportedLanguage(String, usize),
    #[error("split ratios sum to {0}, expected 1")]
    RatioSum(f64),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error(transparent)]
    Stem(#[from] StemError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CorpusError {
    /// 1-based line number for per-line errors.
    pub fn line(&self) -> Option<usize> {
        match self {
            CorpusError::MalformedLine(l, _)
            | CorpusError::MissingField(_, l)
            | CorpusError::EmptyField(_, l)
            | CorpusError::UnsupportedLanguage(_, l) => Some(*l),
            _ => None,
        }
    }
}

/// One news sample. Serialized with the article text under `"article"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub id: String,
    pub language: String,
    pub headline: String,
    #[serde(rename = "article")]
    pub body: String,
    pub captions: Vec<String>,
    pub image_ids: Vec<String>,
    pub tags: Vec<String>,
}

impl ArticleRecord {
    /// Parses and validates one corpus line. `line_no` is 1-based.
    pub fn from_json_line(line: &str, line_no: usize) -> Result<Self, CorpusError> {
        let value: Value =
            serde_json::from_str(line).map_err(|e| CorpusError::MalformedLine(line_no, e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| CorpusError::MalformedLine(line_no, "not a JSON object".into()))?;
        let text = |field: &'static str| -> Result<String, CorpusError> {
            match obj.get(field) {
                None | Some(Value::Null) => Err(CorpusError::MissingField(field, line_no)),
                Some(Value::String(s)) => Ok(s.clone()),
                Some(_) => Err(CorpusError::MalformedLine(line_no, format!("{field} must be a string"))),
            }
        };
        let list = |field: &'static str| -> Result<Vec<String>, CorpusError> {
            match obj.get(field) {
                None | Some(Value::Null) => Err(CorpusError::MissingField(field, line_no)),
                Some(Value::Array(items)) => items
                    .iter()
                    .map(|v| {
                        v.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| CorpusError::MalformedLine(line_no, format!("{field} must hold strings")))
                    })
                    .collect(),
                Some(_) => Err(CorpusError::MalformedLine(line_no, format!("{field} must be an array"))),
            }
        };
        let record = ArticleRecord {
            id: text("id")?,
            language: text("language")?,
            headline: text("headline")?,
            body: text("article")?,
            captions: list("captions")?,
            image_ids: list("image_ids")?,
            tags: list("tags")?,
        };
        record.validate(line_no)?;
        Ok(record)
    }

    pub fn validate(&self, line_no: usize) -> Result<(), CorpusError> {
        if !lang::is_supported(&self.language) {
            return Err(CorpusError::UnsupportedLanguage(self.language.clone(), line_no));
        }
        if self.headline.trim().is_empty() {
            return Err(CorpusError::EmptyField("headline", line_no));
        }
        if self.body.trim().is_empty() {
            return Err(CorpusError::EmptyField("article", line_no));
        }
        if self.tags.iter().all(|t| t.trim().is_empty()) {
            return Err(CorpusError::EmptyField("tags", line_no));
        }
        Ok(())
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// A line that failed validation during lenient ingestion.
#[derive(Debug)]
pub struct Reject {
    pub line: usize,
    pub error: CorpusError,
}

/// Parses every non-blank line, stopping at the first invalid one.
pub fn read_corpus(reader: impl BufRead) -> Result<Vec<ArticleRecord>, CorpusError> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(ArticleRecord::from_json_line(&line, i + 1)?);
    }
    Ok(records)
}

/// Like [`read_corpus`] but collects invalid lines instead of failing.
pub fn read_corpus_lenient(reader: impl BufRead) -> Result<(Vec<ArticleRecord>, Vec<Reject>), CorpusError> {
    let mut records = Vec::new();
    let mut rejects = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match ArticleRecord::from_json_line(&line, i + 1) {
            Ok(r) => records.push(r),
            Err(error) => rejects.push(Reject { line: i + 1, error }),
        }
    }
    Ok((records, rejects))
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<ArticleRecord>, CorpusError> {
    let file = std::fs::File::open(path)?;
    read_corpus(std::io::BufReader::new(file))
}

pub fn write_corpus(mut out: impl Write, records: &[ArticleRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_json_line())?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.95,
            val: 0.01,
            test: 0.04,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Split<T> {
    pub train: Vec<T>,
    pub val: Vec<T>,
    pub test: Vec<T>,
}

/// Sizes of the three parts for a group of `n`: floor of the validation and
/// test shares, remainder to train.
pub fn split_sizes(n: usize, ratios: SplitRatios) -> (usize, usize, usize) {
    // 0.29 * 100 is 28.999... in binary; the nudge keeps it at 29
    let part = |r: f64| ((r * n as f64) + 1e-9).floor() as usize;
    let val = part(ratios.val).min(n);
    let test = part(ratios.test).min(n - val);
    (n - val - test, val, test)
}

/// Shuffles each language group with a seeded RNG, cuts it by
/// [`split_sizes`], and concatenates the groups in language-code order.
pub fn split_corpus<T: Clone>(
    records: &[T],
    language_of: impl Fn(&T) -> &str,
    ratios: SplitRatios,
    seed: u64,
) -> Result<Split<T>, CorpusError> {
    let sum = ratios.train + ratios.val + ratios.test;
    let valid = [ratios.train, ratios.val, ratios.test]
        .iter()
        .all(|r| (0.0..=1.0).contains(r));
    if (sum - 1.0).abs() > 1e-9 || !valid {
        return Err(CorpusError::RatioSum(sum));
    }
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        groups.entry(language_of(r)).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = Split {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for idx in groups.values_mut() {
        idx.shuffle(&mut rng);
        let (_, val, test) = split_sizes(idx.len(), ratios);
        let pick = |range: &[usize]| range.iter().map(|&i| records[i].clone()).collect::<Vec<_>>();
        split.val.extend(pick(&idx[..val]));
        split.test.extend(pick(&idx[val..val + test]));
        split.train.extend(pick(&idx[val + test..]));
    }
    Ok(split)
}

pub fn split_records(
    records: &[ArticleRecord],
    ratios: SplitRatios,
    seed: u64,
) -> Result<Split<ArticleRecord>, CorpusError> {
    split_corpus(records, |r| r.language.as_str(), ratios, seed)
}

/// Whitespace word count.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// `(1 - |headline| / |article|) * 100`, lengths in whitespace words.
pub fn compression_pct(headline: &str, body: &str) -> f64 {
    let body_words = word_count(body);
    if body_words == 0 {
        return 0.0;
    }
    (1.0 - word_count(headline) as f64 / body_words as f64) * 100.0
}

fn lower_words(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_lowercase).collect()
}

/// Share of headline n-grams (with repeats) that never occur in the body, as
/// a percentage. `None` when the headline has fewer than `n` words.
pub fn novel_ngram_pct(headline: &str, body: &str, n: usize) -> Option<f64> {
    let h = lower_words(headline);
    if n == 0 || h.len() < n {
        return None;
    }
    let b = lower_words(body);
    let body_grams: HashSet<&[String]> = b.windows(n).collect();
    let grams = h.windows(n);
    let total = grams.len();
    let novel = grams.filter(|g| !body_grams.contains(g)).count();
    Some(novel as f64 / total as f64 * 100.0)
}

fn strip_punct(token: &str) -> &str {
    token.trim_matches(|c: char| !c.is_alphanumeric())
}

fn normalized_tokens(stemmer: &Stemmer, text: &str, language: &str) -> Result<Vec<String>, StemError> {
    let cleaned: Vec<&str> = text
        .split_whitespace()
        .map(strip_punct)
        .filter(|t| !t.is_empty())
        .collect();
    let joined = cleaned.join(" ");
    Ok(stemmer
        .normalize_tag(&joined, language)?
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect())
}

/// Percentage of distinct normalized tags occurring as a contiguous token run
/// in the normalized body. `None` if the record has no usable tags.
pub fn present_tag_pct(stemmer: &Stemmer, record: &ArticleRecord) -> Result<Option<f64>, StemError> {
    let lang = record.language.as_str();
    let body = normalized_tokens(stemmer, &record.body, lang)?;
    let mut seen: Vec<Vec<String>> = Vec::new();
    for tag in &record.tags {
        let toks = normalized_tokens(stemmer, tag, lang)?;
        if !toks.is_empty() && !seen.contains(&toks) {
            seen.push(toks);
        }
    }
    if seen.is_empty() {
        return Ok(None);
    }
    let present = seen
        .iter()
        .filter(|t| body.windows(t.len()).any(|w| w == t.as_slice()))
        .count();
    Ok(Some(present as f64 / seen.len() as f64 * 100.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_samples: usize,
    pub avg_words: f64,
    pub avg_sentences: f64,
    pub avg_headline_words: f64,
    /// Keyed by n = 1..=4.
    pub novel_ngram_pct: BTreeMap<usize, f64>,
    pub compression_ratio_pct: f64,
    pub avg_image_caption_pairs: f64,
    pub avg_tags: f64,
    pub present_tag_pct: f64,
    /// Mean subword tokens per article, when a vocabulary was supplied.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub avg_subword_tokens: Option<f64>,
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Macro-averaged statistics over `records`.
///
/// Image–caption pairs per record are counted as the larger of the image and
/// caption counts. Tags are counted after normalization and de-duplication.
pub fn compute_stats(
    records: &[ArticleRecord],
    segmenter: &Segmenter,
    stemmer: &Stemmer,
    vocab: Option<&SubwordVocab>,
) -> Result<CorpusStats, CorpusError> {
    if records.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut sentences = Vec::with_capacity(records.len());
    let mut tag_counts = Vec::with_capacity(records.len());
    let mut present = Vec::new();
    for r in records {
        sentences.push(segmenter.segment(&r.body, &r.language)?.len() as f64);
        tag_counts.push(normalize_tags(stemmer, &r.tags, &r.language, true)?.len() as f64);
        if let Some(p) = present_tag_pct(stemmer, r)? {
            present.push(p);
        }
    }
    let novel_ngram_pct = (1..=4)
        .map(|n| {
            (
                n,
                mean(records.iter().filter_map(|r| novel_ngram_pct(&r.headline, &r.body, n))),
            )
        })
        .collect();
    Ok(CorpusStats {
        n_samples: records.len(),
        avg_words: mean(records.iter().map(|r| word_count(&r.body) as f64)),
        avg_sentences: mean(sentences),
        avg_headline_words: mean(records.iter().map(|r| word_count(&r.headline) as f64)),
        novel_ngram_pct,
        compression_ratio_pct: mean(records.iter().map(|r| compression_pct(&r.headline, &r.body))),
        avg_image_caption_pairs: mean(records.iter().map(|r| r.image_ids.len().max(r.captions.len()) as f64)),
        avg_tags: mean(tag_counts),
        present_tag_pct: mean(present),
        avg_subword_tokens: vocab.map(|v| mean(records.iter().map(|r| v.tokenize(&r.body).len() as f64))),
    })
}

/// Statistics per language plus the whole-corpus summary.
pub fn compute_stats_by_language(
    records: &[ArticleRecord],
    segmenter: &Segmenter,
    stemmer: &Stemmer,
    vocab: Option<&SubwordVocab>,
) -> Result<(BTreeMap<String, CorpusStats>, CorpusStats), CorpusError> {
    let summary = compute_stats(records, segmenter, stemmer, vocab)?;
    let mut groups: BTreeMap<String, Vec<ArticleRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.language.clone()).or_default().push(r.clone());
    }
    let per_lang = groups
        .into_iter()
        .map(|(l, rs)| Ok((l, compute_stats(&rs, segmenter, stemmer, vocab)?)))
        .collect::<Result<_, CorpusError>>()?;
    Ok((per_lang, summary))
}
