//! The language set covered by the corpus.

/// ISO-639-1 codes of the 20 corpus languages.
pub const SUPPORTED_LANGUAGES: [&str; 20] = [
    "en", "pt", "es", "ru", "uk", "pa", "gu", "hi", "mr", "bn", "fr", "tr", "ar", "zh", "te", "ta", "ne", "fa", "ur",
    "id",
];

pub fn is_supported(code: &str) -> bool {
    SUPPORTED_LANGUAGES.contains(&code)
}

/// Languages whose tags are compared without stemming.
pub const UNSTEMMED_LANGUAGES: [&str; 2] = ["zh", "te"];

/// Returns the configured 20-language set.
pub fn supported_languages() -> Vec<&'static str> {
    SUPPORTED_LANGUAGES.to_vec()
}
