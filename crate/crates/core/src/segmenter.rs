//! Rule-based sentence boundary detection.
//!
//! Each language has a rule table listing its sentence terminators, closing
//! punctuation that may trail a terminator, and abbreviations that suppress a
//! boundary after a single full stop. Tables ship with the crate under
//! `data/segmenter/<code>.toml` and can be replaced at runtime with
//! [`Segmenter::from_dir`].

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang;

#[derive(Debug, Error)]
pub enum SegmentError {
    #[error("unsupported language: {0}")]
    UnsupportedLanguage(String),
    #[error("invalid rule table {path}: {reason}")]
    InvalidTable { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One sentence of a source text, located by byte offsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSpan {
    pub start: usize,
    pub end: usize,
    pub text: String,
}

/// On-disk rule table for one language.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleTableFile {
    pub language: String,
    pub terminators: Vec<String>,
    /// Terminators that end a sentence even without following whitespace.
    #[serde(default)]
    pub unspaced_terminators: Vec<String>,
    #[serde(default)]
    pub closers: Vec<String>,
    #[serde(default)]
    pub abbreviations: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RuleTable {
    terminators: HashSet<char>,
    unspaced: HashSet<char>,
    closers: HashSet<char>,
    abbreviations: HashSet<String>,
}

fn single_char(s: &str, field: &str, lang: &str) -> Result<char, SegmentError> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(SegmentError::InvalidTable {
            path: lang.to_string(),
            reason: format!("{field} entry {s:?} is not a single codepoint"),
        }),
    }
}

impl RuleTable {
    pub fn from_file(file: &RuleTableFile) -> Result<Self, SegmentError> {
        let lang = file.language.as_str();
        let chars = |items: &[String], field: &str| -> Result<HashSet<char>, SegmentError> {
            items.iter().map(|s| single_char(s, field, lang)).collect()
        };
        let terminators = chars(&file.terminators, "terminators")?;
        let unspaced = chars(&file.unspaced_terminators, "unspaced_terminators")?;
        if terminators.is_empty() && unspaced.is_empty() {
            return Err(SegmentError::InvalidTable {
                path: lang.to_string(),
                reason: "no terminators".into(),
            });
        }
        Ok(RuleTable {
            terminators,
            unspaced,
            closers: chars(&file.closers, "closers")?,
            abbreviations: file.abbreviations.iter().map(|a| a.to_lowercase()).collect(),
        })
    }

    fn is_terminator(&self, c: char) -> bool {
        self.terminators.contains(&c) || self.unspaced.contains(&c)
    }
}

macro_rules! builtin_tables {
    ($($code:literal),* $(,)?) => {
        &[$(($code, include_str!(concat!("../data/segmenter/", $code, ".toml")))),*]
    };
}

const BUILTIN: &[(&str, &str)] = builtin_tables!(
    "en", "pt", "es", "ru", "uk", "pa", "gu", "hi", "mr", "bn", "fr", "tr", "ar", "zh", "te", "ta", "ne", "fa", "ur",
    "id",
);

/// Sentence segmenter holding one immutable rule table per language.
#[derive(Debug, Clone)]
pub struct Segmenter {
    tables: HashMap<String, RuleTable>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Segmenter {
    /// Segmenter backed by the rule tables compiled into the crate.
    pub fn builtin() -> Self {
        let tables = BUILTIN
            .iter()
            .map(|(code, src)| {
                let file: RuleTableFile = toml::from_str(src).unwrap_or_else(|e| panic!("builtin table {code}: {e}"));
                let table = RuleTable::from_file(&file).unwrap_or_else(|e| panic!("builtin table {code}: {e}"));
                (code.to_string(), table)
            })
            .collect();
        Segmenter { tables }
    }

    /// Loads every `<code>.toml` in `dir`, overriding the builtin table for
    /// that language.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self, SegmentError> {
        let mut seg = Self::builtin();
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("toml") {
                continue;
            }
            let src = std::fs::read_to_string(&path)?;
            let file: RuleTableFile = toml::from_str(&src).map_err(|e| SegmentError::InvalidTable {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            if !lang::is_supported(&file.language) {
                return Err(SegmentError::UnsupportedLanguage(file.language));
            }
            let table = RuleTable::from_file(&file)?;
            seg.tables.insert(file.language, table);
        }
        Ok(seg)
    }

    pub fn supported_languages(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.tables.keys().map(String::as_str).collect();
        v.sort_unstable();
        v
    }

    pub fn table(&self, language: &str) -> Result<&RuleTable, SegmentError> {
        self.tables
            .get(language)
            .ok_or_else(|| SegmentError::UnsupportedLanguage(language.to_string()))
    }

    /// Splits `text` into trimmed, ordered, non-overlapping sentences.
    ///
    /// A boundary falls after a run of terminators (plus any trailing
    /// closers) when the run is followed by whitespace or the end of input,
    /// or when the run contains an unspaced terminator. A lone full stop
    /// closing a listed abbreviation is not a boundary. Whitespace-only
    /// input yields no spans; any other input yields at least one.
    pub fn segment(&self, text: &str, language: &str) -> Result<Vec<SentenceSpan>, SegmentError> {
        let table = self.table(language)?;
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut cuts = Vec::new();
        let mut seg_start = 0usize;
        let mut i = 0usize;
        while i < chars.len() {
            let c = chars[i].1;
            if !table.is_terminator(c) {
                i += 1;
                continue;
            }
            let mut j = i;
            let mut unspaced = table.unspaced.contains(&c);
            while j + 1 < chars.len() && table.is_terminator(chars[j + 1].1) {
                j += 1;
                unspaced |= table.unspaced.contains(&chars[j].1);
            }
            while j + 1 < chars.len() && table.closers.contains(&chars[j + 1].1) {
                j += 1;
            }
            let next = chars.get(j + 1).map(|&(_, c)| c);
            let at_break = unspaced || next.is_none_or(char::is_whitespace);
            let lone_stop = i == j || (c == '.' && !table.is_terminator(chars[i + 1].1));
            if at_break && !(c == '.' && lone_stop && is_abbreviation(table, &chars[seg_start..i])) {
                let end = chars.get(j + 1).map_or(text.len(), |&(b, _)| b);
                cuts.push(end);
                seg_start = j + 1;
            }
            i = j + 1;
        }
        if cuts.last() != Some(&text.len()) {
            cuts.push(text.len());
        }

        let mut spans = Vec::with_capacity(cuts.len());
        let mut from = 0;
        for cut in cuts {
            if let Some(span) = trimmed_span(text, from, cut) {
                spans.push(span);
            }
            from = cut;
        }
        Ok(spans)
    }
}

fn is_abbreviation(table: &RuleTable, before: &[(usize, char)]) -> bool {
    if table.abbreviations.is_empty() {
        return false;
    }
    let start = before
        .iter()
        .rposition(|&(_, c)| c.is_whitespace())
        .map_or(0, |p| p + 1);
    let word: String = before[start..]
        .iter()
        .map(|&(_, c)| c)
        .skip_while(|c| !c.is_alphanumeric())
        .collect();
    !word.is_empty() && table.abbreviations.contains(&word.to_lowercase())
}

fn trimmed_span(text: &str, from: usize, to: usize) -> Option<SentenceSpan> {
    let slice = &text[from..to];
    let lead = slice.len() - slice.trim_start().len();
    let trimmed = slice.trim();
    if trimmed.is_empty() {
        return None;
    }
    let start = from + lead;
    Some(SentenceSpan {
        start,
        end: start + trimmed.len(),
        text: trimmed.to_string(),
    })
}

/// Convenience wrapper using the builtin tables.
pub fn segment(text: &str, language: &str) -> Result<Vec<SentenceSpan>, SegmentError> {
    Segmenter::builtin().segment(text, language)
}
