use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

/// Settings read from `--config`. Flags and `HEADTAGS_*` variables win over
/// anything set here.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub vocab: Option<PathBuf>,
    pub language: Option<String>,
    pub k: Option<usize>,
    pub k_values: Option<Vec<usize>>,
    pub modality: Option<String>,
    pub mode: Option<String>,
    pub embeddings: Option<PathBuf>,
    pub service_url: Option<String>,
    pub image_dir: Option<PathBuf>,
    pub fraction: Option<f64>,
    pub strict: Option<bool>,
    pub ratios: Option<Vec<f64>>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}
