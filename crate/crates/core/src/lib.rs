//! Multilingual content selection and evaluation for joint headline and tag
//! generation over news articles.
//!
//! The crate bundles the pieces needed to go from a line-delimited news corpus
//! to instruction-tuning data and back to scores:
//!
//! * [`corpus`]: record ingestion, per-language splitting and corpus statistics.
//! * [`segmenter`]: rule-table sentence boundary detection for the 20 corpus languages.
//! * [`stemmer`]: Snowball English stemmer plus table-driven light stemmers.
//! * [`gen_metrics`]: subword ROUGE-1/2/L, corpus BLEU and length ratio.
//! * [`tag_metrics`]: F1@K, F1@M and F1@O over stem-normalized tag sets.
//! * [`retrieval`]: image- and caption-guided sentence selection.
//! * [`instruction`]: prompt/target formatting and the controlled/unrestricted mixture.
//! * [`baselines`]: LEAD-1 and EXT-ORACLE extractive headlines.

pub mod baselines;
pub mod corpus;
pub mod gen_metrics;
pub mod instruction;
pub mod lang;
pub mod report;
pub mod retrieval;
pub mod segmenter;
pub mod stemmer;
pub mod tag_metrics;

pub use corpus::{ArticleRecord, CorpusError, CorpusStats};
pub use gen_metrics::{SubwordVocab, PRF};
pub use instruction::{InstructionExample, Mode};
pub use report::MetricReport;
pub use retrieval::{EmbeddingProvider, EmbeddingVector, RetrievalSelection};
pub use segmenter::{Segmenter, SentenceSpan};
pub use stemmer::Stemmer;
