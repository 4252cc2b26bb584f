//! Instruction strings for joint headline and tag generation.
//!
//! Inputs take one of two prefixes:
//!
//! ```text
//! Generate Headline and Tag Words: {content}.
//! Generate Headline and Three Tag Words: {content}.
//! ```
//!
//! and targets read `Headline is: {headline}. Tag words are: {t1, t2}.`

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ArticleRecord;

pub const HEADLINE_MARKER: &str = "Headline is:";
pub const TAGS_MARKER: &str = "Tag words are:";
pub const TAG_SEPARATOR: &str = ", ";
pub const DEFAULT_CONTROLLED_FRACTION: f64 = 0.7;

#[derive(Debug, Error, PartialEq)]
pub enum InstructionError {
    #[error("{0} is outside 1..=100")]
    OutOfRange(usize),
    #[error("instruction content is empty")]
    EmptyContent,
    #[error("{0} is empty")]
    EmptyField(&'static str),
    #[error("tag {0:?} contains the tag separator")]
    TagContainsDelimiter(String),
    #[error("missing {0} marker")]
    MissingMarker(&'static str),
    #[error("controlled fraction {0} is outside [0, 1]")]
    InvalidFraction(f64),
    #[error("controlled mode asks for {asked} tags but the record has {actual}")]
    TagCountMismatch { asked: usize, actual: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Controlled(usize),
    Unrestricted,
}

impl Mode {
    pub fn is_controlled(&self) -> bool {
        matches!(self, Mode::Controlled(_))
    }
}

const ONES: [&str; 20] = [
    "",
    "One",
    "Two",
    "Three",
    "Four",
    "Five",
    "Six",
    "Seven",
    "Eight",
    "Nine",
    "Ten",
    "Eleven",
    "Twelve",
    "Thirteen",
    "Fourteen",
    "Fifteen",
    "Sixteen",
    "Seventeen",
    "Eighteen",
    "Nineteen",
];
const TENS: [&str; 10] = [
    "", "", "Twenty", "Thirty", "Forty", "Fifty", "Sixty", "Seventy", "Eighty", "Ninety",
];

/// Capitalized English cardinal for 1..=100, hyphenating compounds.
pub fn verbalize(n: usize) -> Result<String, InstructionError> {
    match n {
        1..=19 => Ok(ONES[n].to_string()),
        20..=99 if n.is_multiple_of(10) => Ok(TENS[n / 10].to_string()),
        20..=99 => Ok(format!("{}-{}", TENS[n / 10], ONES[n % 10])),
        100 => Ok("One Hundred".to_string()),
        _ => Err(InstructionError::OutOfRange(n)),
    }
}

pub fn build_input(content: &str, mode: Mode) -> Result<String, InstructionError> {
    if content.trim().is_empty() {
        return Err(InstructionError::EmptyContent);
    }
    Ok(match mode {
        Mode::Unrestricted => format!("Generate Headline and Tag Words: {content}."),
        Mode::Controlled(n) => format!("Generate Headline and {} Tag Words: {content}.", verbalize(n)?),
    })
}

pub fn build_target<S: AsRef<str>>(headline: &str, tags: &[S]) -> Result<String, InstructionError> {
    if headline.trim().is_empty() {
        return Err(InstructionError::EmptyField("headline"));
    }
    if tags.is_empty() {
        return Err(InstructionError::EmptyField("tags"));
    }
    for tag in tags {
        let tag = tag.as_ref();
        if tag.trim().is_empty() {
            return Err(InstructionError::EmptyField("tag"));
        }
        if tag.contains(',') {
            return Err(InstructionError::TagContainsDelimiter(tag.to_string()));
        }
    }
    let joined = tags.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(TAG_SEPARATOR);
    Ok(format!("{HEADLINE_MARKER} {headline}. {TAGS_MARKER} {joined}."))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedOutput {
    pub headline: String,
    pub tags: Vec<String>,
}

fn find_ci(haystack_lower: &str, needle: &str, from: usize) -> Option<usize> {
    haystack_lower[from..]
        .find(&needle.to_ascii_lowercase())
        .map(|i| i + from)
}

fn strip_final_period(s: &str) -> &str {
    let s = s.trim();
    s.strip_suffix('.').unwrap_or(s).trim_end()
}

/// Splits model output into headline and tags. Markers match ASCII
/// case-insensitively. In lenient mode a missing tag marker yields no tags
/// and a missing headline marker takes everything before the tag marker.
pub fn parse_output(text: &str, strict: bool) -> Result<ParsedOutput, InstructionError> {
    let lower = text.to_ascii_lowercase();
    let head_at = find_ci(&lower, HEADLINE_MARKER, 0);
    if strict && head_at.is_none() {
        return Err(InstructionError::MissingMarker("headline"));
    }
    let head_start = head_at.map_or(0, |i| i + HEADLINE_MARKER.len());
    let tags_at = find_ci(&lower, TAGS_MARKER, head_start);
    if strict && tags_at.is_none() {
        return Err(InstructionError::MissingMarker("tags"));
    }
    let head_end = tags_at.unwrap_or(text.len());
    let headline = strip_final_period(&text[head_start..head_end]).to_string();
    let tags = match tags_at {
        None => Vec::new(),
        Some(i) => strip_final_period(&text[i + TAGS_MARKER.len()..])
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect(),
    };
    Ok(ParsedOutput { headline, tags })
}

/// Number of controlled examples out of `n`: `fraction * n` rounded half up.
pub fn controlled_count(n: usize, fraction: f64) -> usize {
    // 0.7 * 45 is 31.499999... in binary; the nudge restores the decimal half
    (fraction * n as f64 + 0.5 + 1e-9).floor() as usize
}

/// Seeded controlled/unrestricted assignment. `tag_counts[i]` is the tag
/// count of record `i` and becomes its controlled N.
pub fn mixture_assign(tag_counts: &[usize], fraction: f64, seed: u64) -> Result<Vec<Mode>, InstructionError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(InstructionError::InvalidFraction(fraction));
    }
    let n = tag_counts.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut modes = vec![Mode::Unrestricted; n];
    for &i in &order[..controlled_count(n, fraction).min(n)] {
        modes[i] = Mode::Controlled(tag_counts[i]);
    }
    Ok(modes)
}

/// One instruction-tuning pair. Serialized as
/// `{"id", "input", "target", "mode", "n"}` with `n` null when unrestricted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ExampleRow", into = "ExampleRow")]
pub struct InstructionExample {
    pub record_id: String,
    pub input_text: String,
    pub target_text: String,
    pub mode: Mode,
}

#[derive(Serialize, Deserialize)]
struct ExampleRow {
    id: String,
    input: String,
    target: String,
    mode: String,
    n: Option<usize>,
}

impl From<InstructionExample> for ExampleRow {
    fn from(e: InstructionExample) -> Self {
        let (mode, n) = match e.mode {
            Mode::Controlled(n) => ("controlled", Some(n)),
            Mode::Unrestricted => ("unrestricted", None),
        };
        ExampleRow {
            id: e.record_id,
            input: e.input_text,
            target: e.target_text,
            mode: mode.to_string(),
            n,
        }
    }
}

impl TryFrom<ExampleRow> for InstructionExample {
    type Error = String;

    fn try_from(r: ExampleRow) -> Result<Self, Self::Error> {
        let mode = match (r.mode.as_str(), r.n) {
            ("controlled", Some(n)) if n > 0 => Mode::Controlled(n),
            ("controlled", _) => return Err("controlled example needs a positive n".into()),
            ("unrestricted", _) => Mode::Unrestricted,
            (other, _) => return Err(format!("unknown mode {other:?}")),
        };
        Ok(InstructionExample {
            record_id: r.id,
            input_text: r.input,
            target_text: r.target,
            mode,
        })
    }
}

impl InstructionExample {
    /// Builds the pair for `record` around already selected `content`.
    pub fn build(record: &ArticleRecord, content: &str, mode: Mode) -> Result<Self, InstructionError> {
        if let Mode::Controlled(asked) = mode {
            if asked != record.tags.len() {
                return Err(InstructionError::TagCountMismatch {
                    asked,
                    actual: record.tags.len(),
                });
            }
        }
        Ok(InstructionExample {
            record_id: record.id.clone(),
            input_text: build_input(content, mode)?,
            target_text: build_target(&record.headline, &record.tags)?,
            mode,
        })
    }
}
