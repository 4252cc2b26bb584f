use serde::{Deserialize, Serialize};

use super::StemError;

/// One affix rule: strip `affix`, append `replacement`, but only when at least
/// `min_stem` codepoints remain before the replacement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffixRule {
    pub affix: String,
    #[serde(default)]
    pub replacement: String,
    #[serde(default = "default_min_stem")]
    pub min_stem: usize,
}

fn default_min_stem() -> usize {
    2
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffixTableFile {
    pub language: String,
    #[serde(default)]
    pub prefixes: Vec<AffixRule>,
    #[serde(default)]
    pub suffixes: Vec<AffixRule>,
}

/// Light stemmer: at most one prefix and one suffix rule fire per call,
/// longest affix first.
#[derive(Debug, Clone)]
pub struct AffixTable {
    language: String,
    prefixes: Vec<AffixRule>,
    suffixes: Vec<AffixRule>,
}

impl AffixTable {
    pub fn parse(src: &str, origin: &str) -> Result<Self, StemError> {
        let file: AffixTableFile = toml::from_str(src).map_err(|e| StemError::InvalidTable {
            path: origin.to_string(),
            reason: e.to_string(),
        })?;
        Self::from_file(file, origin)
    }

    pub fn from_file(file: AffixTableFile, origin: &str) -> Result<Self, StemError> {
        for rule in file.prefixes.iter().chain(&file.suffixes) {
            if rule.affix.is_empty() || rule.replacement.chars().count() >= rule.affix.chars().count() {
                return Err(StemError::InvalidTable {
                    path: origin.to_string(),
                    reason: format!("rule {:?} -> {:?} must shorten the token", rule.affix, rule.replacement),
                });
            }
        }
        let by_length = |mut rules: Vec<AffixRule>| {
            // stable: equal lengths keep file order
            rules.sort_by_key(|r| std::cmp::Reverse(r.affix.chars().count()));
            rules
        };
        Ok(AffixTable {
            language: file.language,
            prefixes: by_length(file.prefixes),
            suffixes: by_length(file.suffixes),
        })
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn apply(&self, token: &str) -> String {
        let mut word = token.to_string();
        for rule in &self.prefixes {
            if let Some(rest) = word.strip_prefix(rule.affix.as_str()) {
                if rest.chars().count() >= rule.min_stem {
                    word = format!("{}{rest}", rule.replacement);
                    break;
                }
            }
        }
        for rule in &self.suffixes {
            if let Some(stem) = word.strip_suffix(rule.affix.as_str()) {
                if stem.chars().count() >= rule.min_stem {
                    return format!("{stem}{}", rule.replacement);
                }
            }
        }
        word
    }
}
