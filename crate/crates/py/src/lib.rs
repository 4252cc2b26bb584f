//! Python bindings for `headtags_core`.
//!
//! Records cross the boundary as dicts with the corpus keys (`id`,
//! `language`, `headline`, `article`, `captions`, `image_ids`, `tags`).

use std::collections::HashMap;

use headtags_core::corpus::{self, compression_pct, ArticleRecord};
use headtags_core::gen_metrics::{self, PRF};
use headtags_core::instruction::{self, Mode};
use headtags_core::retrieval::{self, EmbeddingVector, Retriever, TableProvider};
use headtags_core::tag_metrics::TagScorer;
use headtags_core::{baselines, segmenter, stemmer};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn prf_tuple(p: PRF) -> (f64, f64, f64) {
    (p.precision, p.recall, p.f1)
}

fn field<'py, T: FromPyObjectOwned<'py>>(d: &Bound<'py, PyDict>, key: &str) -> PyResult<T> {
    match d.get_item(key)? {
        Some(v) => v.extract().map_err(Into::into),
        None => Err(PyKeyError::new_err(key.to_string())),
    }
}

fn record_from_dict(d: &Bound<'_, PyDict>) -> PyResult<ArticleRecord> {
    let record = ArticleRecord {
        id: field(d, "id")?,
        language: field(d, "language")?,
        headline: field(d, "headline")?,
        body: field(d, "article")?,
        captions: field(d, "captions")?,
        image_ids: field(d, "image_ids")?,
        tags: field(d, "tags")?,
    };
    record.validate(0).map_err(value_err)?;
    Ok(record)
}

#[pyclass(name = "Segmenter", frozen)]
struct PySegmenter {
    inner: segmenter::Segmenter,
}

#[pymethods]
impl PySegmenter {
    #[new]
    #[pyo3(signature = (table_dir=None))]
    fn new(table_dir: Option<String>) -> PyResult<Self> {
        let inner = match table_dir {
            Some(dir) => segmenter::Segmenter::from_dir(dir).map_err(value_err)?,
            None => segmenter::Segmenter::builtin(),
        };
        Ok(PySegmenter { inner })
    }

    /// List of `(start, end, text)` with byte offsets into the UTF-8 input.
    fn segment(&self, text: &str, language: &str) -> PyResult<Vec<(usize, usize, String)>> {
        let spans = self.inner.segment(text, language).map_err(value_err)?;
        Ok(spans.into_iter().map(|s| (s.start, s.end, s.text)).collect())
    }

    fn languages(&self) -> Vec<String> {
        self.inner
            .supported_languages()
            .into_iter()
            .map(str::to_string)
            .collect()
    }
}

#[pyclass(name = "Stemmer", frozen)]
struct PyStemmer {
    inner: stemmer::Stemmer,
}

#[pymethods]
impl PyStemmer {
    #[new]
    #[pyo3(signature = (passthrough_unsupported=false))]
    fn new(passthrough_unsupported: bool) -> Self {
        PyStemmer {
            inner: stemmer::Stemmer::builtin().with_passthrough_unsupported(passthrough_unsupported),
        }
    }

    fn stem(&self, token: &str, language: &str) -> PyResult<String> {
        self.inner.stem(token, language).map_err(value_err)
    }

    fn normalize_tag(&self, tag: &str, language: &str) -> PyResult<String> {
        self.inner.normalize_tag(tag, language).map_err(value_err)
    }

    #[pyo3(signature = (pred, gold, language, k))]
    fn f1_at_k(&self, pred: Vec<String>, gold: Vec<String>, language: &str, k: usize) -> PyResult<(f64, f64, f64)> {
        TagScorer::new(&self.inner, language)
            .f1_at_k(&pred, &gold, k)
            .map(prf_tuple)
            .map_err(value_err)
    }

    fn f1_at_m(&self, pred: Vec<String>, gold: Vec<String>, language: &str) -> PyResult<(f64, f64, f64)> {
        TagScorer::new(&self.inner, language)
            .f1_at_m(&pred, &gold)
            .map(prf_tuple)
            .map_err(value_err)
    }

    fn f1_at_o(&self, pred: Vec<String>, gold: Vec<String>, language: &str) -> PyResult<(f64, f64, f64)> {
        TagScorer::new(&self.inner, language)
            .f1_at_o(&pred, &gold)
            .map(prf_tuple)
            .map_err(value_err)
    }
}

#[pyclass(name = "SubwordVocab", frozen)]
struct PySubwordVocab {
    inner: gen_metrics::SubwordVocab,
}

#[pymethods]
impl PySubwordVocab {
    /// One piece per entry; continuation pieces carry the `##` prefix.
    #[new]
    #[pyo3(signature = (pieces, unknown_token="[UNK]"))]
    fn new(pieces: Vec<String>, unknown_token: &str) -> PyResult<Self> {
        let inner = gen_metrics::SubwordVocab::new(pieces, "##", unknown_token).map_err(value_err)?;
        Ok(PySubwordVocab { inner })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let inner = gen_metrics::SubwordVocab::from_file(path).map_err(value_err)?;
        Ok(PySubwordVocab { inner })
    }

    fn tokenize(&self, text: &str) -> Vec<String> {
        self.inner.tokenize(text)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn headline_report(&self, hyps: Vec<String>, refs: Vec<String>) -> PyResult<HashMap<String, f64>> {
        let report = gen_metrics::headline_report(&hyps, &refs, &self.inner).map_err(value_err)?;
        Ok(report.iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    fn lead_1(&self, record: &Bound<'_, PyDict>) -> PyResult<String> {
        let record = record_from_dict(record)?;
        baselines::lead_1(&record, &segmenter::Segmenter::builtin()).map_err(value_err)
    }

    fn ext_oracle(&self, record: &Bound<'_, PyDict>) -> PyResult<String> {
        let record = record_from_dict(record)?;
        baselines::ext_oracle(&record, &segmenter::Segmenter::builtin(), &self.inner).map_err(value_err)
    }
}

/// Precomputed embeddings for sentence selection.
#[pyclass(name = "EmbeddingTable", frozen)]
struct PyEmbeddingTable {
    inner: TableProvider,
    segmenter: segmenter::Segmenter,
}

#[pymethods]
impl PyEmbeddingTable {
    #[new]
    fn new(dim: usize) -> Self {
        PyEmbeddingTable {
            inner: TableProvider::new(dim),
            segmenter: segmenter::Segmenter::builtin(),
        }
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyEmbeddingTable {
            inner: TableProvider::load(path).map_err(value_err)?,
            segmenter: segmenter::Segmenter::builtin(),
        })
    }

    #[staticmethod]
    fn from_dict(dim: usize, vectors: HashMap<String, Vec<f32>>) -> PyResult<Self> {
        let mut inner = TableProvider::new(dim);
        for (key, v) in vectors {
            inner
                .insert(key, EmbeddingVector::new(v).map_err(value_err)?)
                .map_err(value_err)?;
        }
        Ok(PyEmbeddingTable {
            inner,
            segmenter: segmenter::Segmenter::builtin(),
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// `(indices, sentences)` chosen with the record's images as queries.
    fn img_ret(&self, record: &Bound<'_, PyDict>, k: usize) -> PyResult<(Vec<usize>, Vec<String>)> {
        let record = record_from_dict(record)?;
        let got = Retriever::new(&self.segmenter, &self.inner)
            .img_ret(&record, k)
            .map_err(value_err)?;
        Ok((got.selection.indices, got.sentences))
    }

    /// `(indices, sentences)` chosen with the record's captions as queries.
    fn cap_ret(&self, record: &Bound<'_, PyDict>, k: usize) -> PyResult<(Vec<usize>, Vec<String>)> {
        let record = record_from_dict(record)?;
        let got = Retriever::new(&self.segmenter, &self.inner)
            .cap_ret(&record, k)
            .map_err(value_err)?;
        Ok((got.selection.indices, got.sentences))
    }
}

#[pyfunction]
fn rouge_n(hyp: Vec<String>, reference: Vec<String>, n: usize) -> (f64, f64, f64) {
    prf_tuple(gen_metrics::rouge_n(&hyp, &reference, n))
}

#[pyfunction]
fn rouge_l(hyp: Vec<String>, reference: Vec<String>) -> (f64, f64, f64) {
    prf_tuple(gen_metrics::rouge_l(&hyp, &reference))
}

#[pyfunction]
#[pyo3(signature = (hyps, refs, max_n=4))]
fn corpus_bleu(hyps: Vec<Vec<String>>, refs: Vec<Vec<String>>, max_n: usize) -> PyResult<f64> {
    gen_metrics::corpus_bleu(&hyps, &refs, max_n).map_err(value_err)
}

#[pyfunction]
fn cosine(a: Vec<f32>, b: Vec<f32>) -> PyResult<f64> {
    let a = EmbeddingVector::new(a).map_err(value_err)?;
    let b = EmbeddingVector::new(b).map_err(value_err)?;
    retrieval::cosine(&a, &b).map_err(value_err)
}

#[pyfunction]
fn select_top_k(scores: Vec<f64>, k: usize) -> Vec<usize> {
    retrieval::select_top_k(&scores, k).indices
}

#[pyfunction]
fn verbalize(n: usize) -> PyResult<String> {
    instruction::verbalize(n).map_err(value_err)
}

/// `n=None` gives the unrestricted prefix.
#[pyfunction]
#[pyo3(signature = (content, n=None))]
fn build_input(content: &str, n: Option<usize>) -> PyResult<String> {
    let mode = n.map_or(Mode::Unrestricted, Mode::Controlled);
    instruction::build_input(content, mode).map_err(value_err)
}

#[pyfunction]
fn build_target(headline: &str, tags: Vec<String>) -> PyResult<String> {
    instruction::build_target(headline, &tags).map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (text, strict=false))]
fn parse_output(text: &str, strict: bool) -> PyResult<(String, Vec<String>)> {
    let p = instruction::parse_output(text, strict).map_err(value_err)?;
    Ok((p.headline, p.tags))
}

/// Controlled N per record, `None` for unrestricted.
#[pyfunction]
#[pyo3(signature = (tag_counts, fraction=0.7, seed=0))]
fn mixture_assign(tag_counts: Vec<usize>, fraction: f64, seed: u64) -> PyResult<Vec<Option<usize>>> {
    let modes = instruction::mixture_assign(&tag_counts, fraction, seed).map_err(value_err)?;
    Ok(modes
        .into_iter()
        .map(|m| match m {
            Mode::Controlled(n) => Some(n),
            Mode::Unrestricted => None,
        })
        .collect())
}

#[pyfunction]
fn compression(headline: &str, body: &str) -> f64 {
    compression_pct(headline, body)
}

/// `(train, val, test)` sizes for a language group of `n` records.
#[pyfunction]
#[pyo3(signature = (n, train=0.95, val=0.01, test=0.04))]
fn split_sizes(n: usize, train: f64, val: f64, test: f64) -> (usize, usize, usize) {
    corpus::split_sizes(n, corpus::SplitRatios { train, val, test })
}

#[pymodule]
fn headtags(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySegmenter>()?;
    m.add_class::<PyStemmer>()?;
    m.add_class::<PySubwordVocab>()?;
    m.add_class::<PyEmbeddingTable>()?;
    m.add_function(wrap_pyfunction!(rouge_n, m)?)?;
    m.add_function(wrap_pyfunction!(rouge_l, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_bleu, m)?)?;
    m.add_function(wrap_pyfunction!(cosine, m)?)?;
    m.add_function(wrap_pyfunction!(select_top_k, m)?)?;
    m.add_function(wrap_pyfunction!(verbalize, m)?)?;
    m.add_function(wrap_pyfunction!(build_input, m)?)?;
    m.add_function(wrap_pyfunction!(build_target, m)?)?;
    m.add_function(wrap_pyfunction!(parse_output, m)?)?;
    m.add_function(wrap_pyfunction!(mixture_assign, m)?)?;
    m.add_function(wrap_pyfunction!(compression, m)?)?;
    m.add_function(wrap_pyfunction!(split_sizes, m)?)?;
    Ok(())
}
