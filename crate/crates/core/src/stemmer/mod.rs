//! Token stemming and tag normalization.
//!
//! English uses the Snowball algorithm; a handful of other languages use light
//! affix-stripping tables shipped under `data/stemmer/<code>.toml`. Chinese and
//! Telugu tags are compared unstemmed, as is every corpus language without a
//! table.

mod english;
mod suffix;

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::lang;

pub use english::stem as stem_english;
pub use suffix::{AffixRule, AffixTable, AffixTableFile};

#[derive(Debug, Error)]
pub enum StemError {
    #[error("unsupported language: {0}")]
    UnsupportedLanguage(String),
    #[error("token contains whitespace: {0:?}")]
    Whitespace(String),
    #[error("invalid affix table {path}: {reason}")]
    InvalidTable { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Tokens shorter than this many codepoints are never stemmed.
pub const MIN_STEMMABLE_CHARS: usize = 3;

/// Upper bound on re-stemming rounds in [`Stemmer::normalize_tag`].
const MAX_ROUNDS: usize = 8;

const BUILTIN: &[(&str, &str)] = &[
    ("ar", include_str!("../../data/stemmer/ar.toml")),
    ("bn", include_str!("../../data/stemmer/bn.toml")),
    ("es", include_str!("../../data/stemmer/es.toml")),
    ("fr", include_str!("../../data/stemmer/fr.toml")),
    ("hi", include_str!("../../data/stemmer/hi.toml")),
    ("id", include_str!("../../data/stemmer/id.toml")),
    ("pt", include_str!("../../data/stemmer/pt.toml")),
    ("ru", include_str!("../../data/stemmer/ru.toml")),
    ("tr", include_str!("../../data/stemmer/tr.toml")),
];

#[derive(Debug, Clone)]
pub struct Stemmer {
    tables: HashMap<String, AffixTable>,
    passthrough_unsupported: bool,
}

impl Default for Stemmer {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Stemmer {
    pub fn builtin() -> Self {
        let tables = BUILTIN
            .iter()
            .map(|(code, src)| {
                let table = AffixTable::parse(src, code).unwrap_or_else(|e| panic!("builtin affix table {code}: {e}"));
                (code.to_string(), table)
            })
            .collect();
        Stemmer {
            tables,
            passthrough_unsupported: false,
        }
    }

    /// Builtin tables overridden by every `<code>.toml` found in `dir`.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self, StemError> {
        let mut stemmer = Self::builtin();
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("toml") {
                continue;
            }
            let table = AffixTable::parse(&std::fs::read_to_string(&path)?, &path.display().to_string())?;
            if !lang::is_supported(table.language()) {
                return Err(StemError::UnsupportedLanguage(table.language().to_string()));
            }
            stemmer.tables.insert(table.language().to_string(), table);
        }
        Ok(stemmer)
    }

    /// Return tokens unchanged for languages outside the corpus set instead of
    /// failing.
    pub fn with_passthrough_unsupported(mut self, yes: bool) -> Self {
        self.passthrough_unsupported = yes;
        self
    }

    fn check_language(&self, language: &str) -> Result<bool, StemError> {
        if lang::is_supported(language) {
            Ok(true)
        } else if self.passthrough_unsupported {
            Ok(false)
        } else {
            Err(StemError::UnsupportedLanguage(language.to_string()))
        }
    }

    fn stem_unchecked(&self, token: &str, language: &str) -> String {
        if token.chars().count() < MIN_STEMMABLE_CHARS || lang::UNSTEMMED_LANGUAGES.contains(&language) {
            return token.to_string();
        }
        if language == "en" {
            return english::stem(token);
        }
        match self.tables.get(language) {
            Some(table) => table.apply(token),
            None => token.to_string(),
        }
    }

    /// Stems a single whitespace-free token. One pass of the language's rules.
    pub fn stem(&self, token: &str, language: &str) -> Result<String, StemError> {
        if token.chars().any(char::is_whitespace) {
            return Err(StemError::Whitespace(token.to_string()));
        }
        if !self.check_language(language)? {
            return Ok(token.to_string());
        }
        Ok(self.stem_unchecked(token, language))
    }

    /// Lowercases, collapses whitespace and stems every token of `tag`.
    ///
    /// Each token is re-stemmed until it stops changing, so the result is a
    /// fixed point: normalizing a normalized tag returns it unchanged.
    pub fn normalize_tag(&self, tag: &str, language: &str) -> Result<String, StemError> {
        let stem = self.check_language(language)?;
        let lowered = tag.to_lowercase();
        let tokens: Vec<String> = lowered
            .split_whitespace()
            .map(|tok| {
                if !stem {
                    return tok.to_string();
                }
                let mut cur = tok.to_string();
                for _ in 0..MAX_ROUNDS {
                    let next = self.stem_unchecked(&cur, language);
                    if next == cur {
                        break;
                    }
                    cur = next;
                }
                cur
            })
            .collect();
        Ok(tokens.join(" "))
    }

    pub fn has_table(&self, language: &str) -> bool {
        language == "en" || self.tables.contains_key(language)
    }
}
