//! Image- and caption-guided sentence selection.
//!
//! Every sentence of the article is scored by the sum of its cosine
//! similarities to each query (image or caption), the K best are kept and
//! returned in document order.

mod http;
mod table;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ArticleRecord;
use crate::segmenter::{SegmentError, Segmenter};

pub use http::HttpProvider;
pub use table::TableProvider;

pub const DEFAULT_DIM: usize = 512;
pub const DEFAULT_K_VALUES: [usize; 3] = [5, 10, 15];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProviderError {
    #[error("no embedding for {0:?}")]
    Missing(String),
    #[error("embedding service: {0}")]
    Transport(String),
    #[error("unexpected response: {0}")]
    Protocol(String),
    #[error("vector for {key:?} has dimension {got}, expected {expected}")]
    Dim { key: String, got: usize, expected: usize },
}

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("no query embeddings")]
    EmptyQueries,
    #[error("record {0:?} has no images")]
    NoImages(String),
    #[error("record {0:?} has no captions")]
    NoCaptions(String),
    #[error("record {0:?} has no sentences")]
    NoSentences(String),
    #[error("non-finite embedding value")]
    NonFinite,
    #[error("retrieved modes need a selection")]
    MissingSelection,
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Segment(#[from] SegmentError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddingVector(Vec<f32>);

impl EmbeddingVector {
    pub fn new(values: Vec<f32>) -> Result<Self, RetrievalError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RetrievalError::NonFinite);
        }
        Ok(EmbeddingVector(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f32] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f32) -> Self {
        EmbeddingVector(self.0.iter().map(|v| v * factor).collect())
    }
}

/// A text to embed. `key` addresses precomputed tables, `text` is what a live
/// model would see.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextItem {
    pub key: String,
    pub text: String,
}

impl TextItem {
    pub fn new(key: impl Into<String>, text: impl Into<String>) -> Self {
        TextItem {
            key: key.into(),
            text: text.into(),
        }
    }
}

/// Source of embeddings in a shared text-image space. Output order must
/// match input order.
pub trait EmbeddingProvider: Send + Sync {
    fn embed_texts(&self, items: &[TextItem]) -> Result<Vec<EmbeddingVector>, ProviderError>;
    fn embed_images(&self, image_ids: &[String]) -> Result<Vec<EmbeddingVector>, ProviderError>;
}

pub fn sentence_key(record_id: &str, i: usize) -> String {
    format!("{record_id}#s{i}")
}

pub fn caption_key(record_id: &str, j: usize) -> String {
    format!("{record_id}#c{j}")
}

/// Cosine similarity, 0 when either vector has zero norm.
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, RetrievalError> {
    if a.dim() != b.dim() {
        return Err(RetrievalError::DimMismatch(a.dim(), b.dim()));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    let dot: f64 = a.0.iter().zip(&b.0).map(|(&x, &y)| x as f64 * y as f64).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// `score[i] = sum_j cosine(sentences[i], queries[j])`.
pub fn aggregate_scores(
    sentences: &[EmbeddingVector],
    queries: &[EmbeddingVector],
) -> Result<Vec<f64>, RetrievalError> {
    if queries.is_empty() {
        return Err(RetrievalError::EmptyQueries);
    }
    sentences
        .iter()
        .map(|s| queries.iter().try_fold(0.0, |acc, q| Ok(acc + cosine(s, q)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalSelection {
    /// Ascending sentence indices.
    pub indices: Vec<usize>,
    /// Aggregate score of each selected index.
    pub scores: Vec<f64>,
    pub k_requested: usize,
    pub k_effective: usize,
}

/// Keeps the `k` highest scores, earlier index first on ties, and returns
/// them in index order.
pub fn select_top_k(scores: &[f64], k: usize) -> RetrievalSelection {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let k_effective = k.min(scores.len());
    let mut indices = order[..k_effective].to_vec();
    indices.sort_unstable();
    RetrievalSelection {
        scores: indices.iter().map(|&i| scores[i]).collect(),
        indices,
        k_requested: k,
        k_effective,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Image,
    Caption,
}

impl std::str::FromStr for Modality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "image" => Ok(Modality::Image),
            "caption" => Ok(Modality::Caption),
            other => Err(format!("unknown modality {other:?}, expected image or caption")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Retrieved {
    pub selection: RetrievalSelection,
    pub sentences: Vec<String>,
}

/// Sentence-level retriever bound to a segmenter and an embedding provider.
pub struct Retriever<'a> {
    segmenter: &'a Segmenter,
    provider: &'a dyn EmbeddingProvider,
}

impl<'a> Retriever<'a> {
    pub fn new(segmenter: &'a Segmenter, provider: &'a dyn EmbeddingProvider) -> Self {
        Retriever { segmenter, provider }
    }

    fn sentence_embeddings(
        &self,
        record: &ArticleRecord,
    ) -> Result<(Vec<String>, Vec<EmbeddingVector>), RetrievalError> {
        let spans = self.segmenter.segment(&record.body, &record.language)?;
        if spans.is_empty() {
            return Err(RetrievalError::NoSentences(record.id.clone()));
        }
        let items: Vec<TextItem> = spans
            .iter()
            .enumerate()
            .map(|(i, s)| TextItem::new(sentence_key(&record.id, i), s.text.clone()))
            .collect();
        let embs = self.provider.embed_texts(&items)?;
        check_count(embs.len(), items.len())?;
        Ok((spans.into_iter().map(|s| s.text).collect(), embs))
    }

    fn run(
        &self,
        record: &ArticleRecord,
        queries: Vec<EmbeddingVector>,
        k: usize,
    ) -> Result<Retrieved, RetrievalError> {
        let (texts, embs) = self.sentence_embeddings(record)?;
        let scores = aggregate_scores(&embs, &queries)?;
        let selection = select_top_k(&scores, k);
        let sentences = selection.indices.iter().map(|&i| texts[i].clone()).collect();
        Ok(Retrieved { selection, sentences })
    }

    /// Uses the record's images as queries.
    pub fn img_ret(&self, record: &ArticleRecord, k: usize) -> Result<Retrieved, RetrievalError> {
        if record.image_ids.is_empty() {
            return Err(RetrievalError::NoImages(record.id.clone()));
        }
        let queries = self.provider.embed_images(&record.image_ids)?;
        check_count(queries.len(), record.image_ids.len())?;
        self.run(record, queries, k)
    }

    /// Uses the record's captions as queries.
    pub fn cap_ret(&self, record: &ArticleRecord, k: usize) -> Result<Retrieved, RetrievalError> {
        if record.captions.is_empty() {
            return Err(RetrievalError::NoCaptions(record.id.clone()));
        }
        let items: Vec<TextItem> = record
            .captions
            .iter()
            .enumerate()
            .map(|(j, c)| TextItem::new(caption_key(&record.id, j), c.clone()))
            .collect();
        let queries = self.provider.embed_texts(&items)?;
        check_count(queries.len(), items.len())?;
        self.run(record, queries, k)
    }

    pub fn retrieve(&self, record: &ArticleRecord, modality: Modality, k: usize) -> Result<Retrieved, RetrievalError> {
        match modality {
            Modality::Image => self.img_ret(record, k),
            Modality::Caption => self.cap_ret(record, k),
        }
    }
}

fn check_count(got: usize, expected: usize) -> Result<(), RetrievalError> {
    if got != expected {
        return Err(ProviderError::Protocol(format!("{got} vectors for {expected} inputs")).into());
    }
    Ok(())
}

pub fn img_ret(
    record: &ArticleRecord,
    k: usize,
    segmenter: &Segmenter,
    provider: &dyn EmbeddingProvider,
) -> Result<Retrieved, RetrievalError> {
    Retriever::new(segmenter, provider).img_ret(record, k)
}

pub fn cap_ret(
    record: &ArticleRecord,
    k: usize,
    segmenter: &Segmenter,
    provider: &dyn EmbeddingProvider,
) -> Result<Retrieved, RetrievalError> {
    Retriever::new(segmenter, provider).cap_ret(record, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContentMode {
    ArticleOnly,
    RetrievedOnly,
    RetrievedPlusArticle,
}

impl std::str::FromStr for ContentMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "article_only" | "article" => Ok(ContentMode::ArticleOnly),
            "retrieved_only" | "retrieved" => Ok(ContentMode::RetrievedOnly),
            "retrieved_plus_article" => Ok(ContentMode::RetrievedPlusArticle),
            _ => Err(format!("unknown content mode {s:?}")),
        }
    }
}

/// Assembles the text placed inside the instruction.
pub fn build_selected_content<S: AsRef<str>>(
    selected: Option<&[S]>,
    record: &ArticleRecord,
    mode: ContentMode,
) -> Result<String, RetrievalError> {
    let joined = || -> Result<String, RetrievalError> {
        let sel = selected.ok_or(RetrievalError::MissingSelection)?;
        Ok(sel.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" "))
    };
    Ok(match mode {
        ContentMode::ArticleOnly => record.body.clone(),
        ContentMode::RetrievedOnly => joined()?,
        ContentMode::RetrievedPlusArticle => format!("{} {}", joined()?, record.body),
    })
}
