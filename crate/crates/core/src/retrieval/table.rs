use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EmbeddingProvider, EmbeddingVector, ProviderError, RetrievalError, TextItem};

#[derive(Deserialize, Serialize)]
struct Header {
    dim: usize,
}

#[derive(Deserialize, Serialize)]
struct Row {
    id: String,
    vector: Vec<f32>,
}

/// Precomputed embeddings keyed by id. Sentences and captions are looked up
/// by their `<record>#s<i>` / `<record>#c<j>` keys, images by image id.
#[derive(Debug, Clone, Default)]
pub struct TableProvider {
    dim: usize,
    vectors: HashMap<String, EmbeddingVector>,
}

impl TableProvider {
    pub fn new(dim: usize) -> Self {
        TableProvider {
            dim,
            vectors: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, key: &str) -> bool {
        self.vectors.contains_key(key)
    }

    pub fn get(&self, key: &str) -> Option<&EmbeddingVector> {
        self.vectors.get(key)
    }

    pub fn insert(&mut self, key: impl Into<String>, vector: EmbeddingVector) -> Result<(), ProviderError> {
        let key = key.into();
        if vector.dim() != self.dim {
            return Err(ProviderError::Dim {
                key,
                got: vector.dim(),
                expected: self.dim,
            });
        }
        self.vectors.insert(key, vector);
        Ok(())
    }

    /// Reads a `{"dim": D}` header line followed by `{"id", "vector"}` lines.
    pub fn read(reader: impl BufRead) -> Result<Self, RetrievalError> {
        let mut lines = reader
            .lines()
            .enumerate()
            .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()));
        let io = |e: std::io::Error| ProviderError::Transport(e.to_string());
        let header = match lines.next() {
            Some((_, line)) => line.map_err(io)?,
            None => return Err(ProviderError::Protocol("embedding table has no header".into()).into()),
        };
        let header: Header =
            serde_json::from_str(&header).map_err(|e| ProviderError::Protocol(format!("bad table header: {e}")))?;
        if header.dim == 0 {
            return Err(ProviderError::Protocol("table dim must be positive".into()).into());
        }
        let mut table = TableProvider::new(header.dim);
        for (i, line) in lines {
            let row: Row = serde_json::from_str(&line.map_err(io)?)
                .map_err(|e| ProviderError::Protocol(format!("line {}: {e}", i + 1)))?;
            let vector = EmbeddingVector::new(row.vector)?;
            table.insert(row.id, vector)?;
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RetrievalError> {
        let path = path.as_ref();
        let file =
            std::fs::File::open(path).map_err(|e| ProviderError::Transport(format!("{}: {e}", path.display())))?;
        Self::read(std::io::BufReader::new(file))
    }

    /// Writes the table with keys in sorted order.
    pub fn write(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", serde_json::to_string(&Header { dim: self.dim })?)?;
        let mut keys: Vec<&String> = self.vectors.keys().collect();
        keys.sort();
        for key in keys {
            let row = Row {
                id: key.clone(),
                vector: self.vectors[key].values().to_vec(),
            };
            writeln!(out, "{}", serde_json::to_string(&row)?)?;
        }
        Ok(())
    }

    fn lookup<'k>(&self, keys: impl Iterator<Item = &'k str>) -> Result<Vec<EmbeddingVector>, ProviderError> {
        keys.map(|k| {
            self.vectors
                .get(k)
                .cloned()
                .ok_or_else(|| ProviderError::Missing(k.to_string()))
        })
        .collect()
    }
}

impl EmbeddingProvider for TableProvider {
    fn embed_texts(&self, items: &[TextItem]) -> Result<Vec<EmbeddingVector>, ProviderError> {
        self.lookup(items.iter().map(|i| i.key.as_str()))
    }

    fn embed_images(&self, image_ids: &[String]) -> Result<Vec<EmbeddingVector>, ProviderError> {
        self.lookup(image_ids.iter().map(String::as_str))
    }
}
