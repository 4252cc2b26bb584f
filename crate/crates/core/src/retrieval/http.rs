use std::path::PathBuf;
use std::time::Duration;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use ureq::Agent;

use super::{EmbeddingProvider, EmbeddingVector, ProviderError, TextItem};

pub const DEFAULT_BATCH: usize = 64;

#[derive(Serialize)]
struct TextRequest<'a> {
    texts: Vec<&'a str>,
}

#[derive(Serialize)]
struct ImageRequest {
    images: Vec<String>,
}

#[derive(Deserialize)]
struct EmbedResponse {
    dim: usize,
    vectors: Vec<Vec<f32>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Health {
    pub status: String,
    pub dim: usize,
    #[serde(default)]
    pub model: String,
}

/// Client for the embedding service (`POST /embed/text`, `POST /embed/image`,
/// `GET /health`). Image ids resolve to files under `image_dir`.
pub struct HttpProvider {
    base_url: String,
    image_dir: Option<PathBuf>,
    batch: usize,
    agent: Agent,
}

impl HttpProvider {
    pub fn new(base_url: impl Into<String>) -> Self {
        let agent: Agent = Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .http_status_as_error(false)
            .build()
            .into();
        HttpProvider {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            image_dir: None,
            batch: DEFAULT_BATCH,
            agent,
        }
    }

    pub fn with_image_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.image_dir = Some(dir.into());
        self
    }

    pub fn with_batch_size(mut self, batch: usize) -> Self {
        self.batch = batch.max(1);
        self
    }

    pub fn health(&self) -> Result<Health, ProviderError> {
        let mut resp = self
            .agent
            .get(format!("{}/health", self.base_url))
            .call()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        if status != 200 {
            return Err(ProviderError::Transport(format!("health returned HTTP {status}")));
        }
        resp.body_mut()
            .read_json()
            .map_err(|e| ProviderError::Protocol(e.to_string()))
    }

    fn post<T: Serialize>(&self, path: &str, body: &T, expected: usize) -> Result<Vec<EmbeddingVector>, ProviderError> {
        let url = format!("{}{}", self.base_url, path);
        let mut resp = self
            .agent
            .post(&url)
            .send_json(body)
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        if status != 200 {
            let detail = resp.body_mut().read_to_string().unwrap_or_default();
            return Err(ProviderError::Transport(format!(
                "{path} returned HTTP {status}: {detail}"
            )));
        }
        let parsed: EmbedResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| ProviderError::Protocol(e.to_string()))?;
        if parsed.vectors.len() != expected {
            return Err(ProviderError::Protocol(format!(
                "{} vectors for {expected} inputs",
                parsed.vectors.len()
            )));
        }
        parsed
            .vectors
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                if v.len() != parsed.dim {
                    return Err(ProviderError::Dim {
                        key: format!("{path}[{i}]"),
                        got: v.len(),
                        expected: parsed.dim,
                    });
                }
                EmbeddingVector::new(v).map_err(|e| ProviderError::Protocol(e.to_string()))
            })
            .collect()
    }

    fn read_image(&self, id: &str) -> Result<String, ProviderError> {
        let dir = self
            .image_dir
            .as_ref()
            .ok_or_else(|| ProviderError::Missing(format!("{id} (no image directory configured)")))?;
        let bytes = std::fs::read(dir.join(id)).map_err(|_| ProviderError::Missing(id.to_string()))?;
        Ok(STANDARD.encode(bytes))
    }
}

impl EmbeddingProvider for HttpProvider {
    fn embed_texts(&self, items: &[TextItem]) -> Result<Vec<EmbeddingVector>, ProviderError> {
        let mut out = Vec::with_capacity(items.len());
        for chunk in items.chunks(self.batch) {
            let body = TextRequest {
                texts: chunk.iter().map(|i| i.text.as_str()).collect(),
            };
            out.extend(self.post("/embed/text", &body, chunk.len())?);
        }
        Ok(out)
    }

    fn embed_images(&self, image_ids: &[String]) -> Result<Vec<EmbeddingVector>, ProviderError> {
        let mut out = Vec::with_capacity(image_ids.len());
        for chunk in image_ids.chunks(self.batch) {
            let images = chunk.iter().map(|id| self.read_image(id)).collect::<Result<_, _>>()?;
            out.extend(self.post("/embed/image", &ImageRequest { images }, chunk.len())?);
        }
        Ok(out)
    }
}
