use std::collections::HashSet;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("unknown token {0:?} is not in the vocabulary")]
    MissingUnknown(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// WordPiece vocabulary: greedy longest-match-first subword splitting with a
/// continuation marker on non-initial pieces (BERT `vocab.txt` compatible).
#[derive(Debug, Clone)]
pub struct SubwordVocab {
    entries: HashSet<String>,
    continuation_marker: String,
    unknown_token: String,
    max_word_chars: usize,
}

impl SubwordVocab {
    pub const DEFAULT_MARKER: &'static str = "##";
    pub const DEFAULT_UNKNOWN: &'static str = "[UNK]";
    /// Words longer than this map straight to the unknown token, as in BERT.
    pub const DEFAULT_MAX_WORD_CHARS: usize = 100;

    pub fn new(
        entries: impl IntoIterator<Item = String>,
        continuation_marker: &str,
        unknown_token: &str,
    ) -> Result<Self, VocabError> {
        let entries: HashSet<String> = entries.into_iter().collect();
        if !entries.contains(unknown_token) {
            return Err(VocabError::MissingUnknown(unknown_token.to_string()));
        }
        Ok(SubwordVocab {
            entries,
            continuation_marker: continuation_marker.to_string(),
            unknown_token: unknown_token.to_string(),
            max_word_chars: Self::DEFAULT_MAX_WORD_CHARS,
        })
    }

    /// Reads a one-piece-per-line vocabulary file.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, VocabError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_lines(&text)
    }

    pub fn from_lines(text: &str) -> Result<Self, VocabError> {
        let entries = text
            .lines()
            .map(|l| l.trim_end_matches('\r'))
            .filter(|l| !l.is_empty())
            .map(str::to_string);
        Self::new(entries, Self::DEFAULT_MARKER, Self::DEFAULT_UNKNOWN)
    }

    pub fn with_max_word_chars(mut self, n: usize) -> Self {
        self.max_word_chars = n;
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, piece: &str) -> bool {
        self.entries.contains(piece)
    }

    pub fn unknown_token(&self) -> &str {
        &self.unknown_token
    }

    pub fn continuation_marker(&self) -> &str {
        &self.continuation_marker
    }

    /// Splits on whitespace, then decomposes each word greedily.
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for word in text.split_whitespace() {
            self.tokenize_word(word, &mut out);
        }
        out
    }

    fn tokenize_word(&self, word: &str, out: &mut Vec<String>) {
        let bounds: Vec<usize> = word
            .char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(word.len()))
            .collect();
        let n_chars = bounds.len() - 1;
        if n_chars > self.max_word_chars {
            out.push(self.unknown_token.clone());
            return;
        }
        let mut pieces = Vec::new();
        let mut start = 0;
        let mut candidate = String::new();
        while start < n_chars {
            let mut found = None;
            for end in (start + 1..=n_chars).rev() {
                candidate.clear();
                if start > 0 {
                    candidate.push_str(&self.continuation_marker);
                }
                candidate.push_str(&word[bounds[start]..bounds[end]]);
                if self.entries.contains(candidate.as_str()) {
                    found = Some(end);
                    break;
                }
            }
            match found {
                Some(end) => {
                    pieces.push(candidate.clone());
                    start = end;
                }
                None => {
                    out.push(self.unknown_token.clone());
                    return;
                }
            }
        }
        out.extend(pieces);
    }
}
