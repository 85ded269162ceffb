use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::BiasError;

/// Word vectors keyed by lowercased token, all of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingStore {
    pub fn new(dimension: usize) -> Result<Self, BiasError> {
        if dimension == 0 {
            return Err(BiasError::Config("embedding dimension must be >= 1".into()));
        }
        Ok(EmbeddingStore {
            dimension,
            vectors: HashMap::new(),
        })
    }

    /// Parses `token v1 v2 ...` lines. Later duplicates overwrite earlier
    /// ones; blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, BiasError> {
        let mut store: Option<EmbeddingStore> = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let mut fields = line.split_whitespace();
            let Some(token) = fields.next() else { continue };
            let vector = fields
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| BiasError::NotNumeric {
                            line: line_no,
                            value: f.to_string(),
                        })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let store = match &mut store {
                Some(s) => s,
                None => {
                    if vector.is_empty() {
                        return Err(BiasError::Dimension {
                            line: line_no,
                            expected: 1,
                            found: 0,
                        });
                    }
                    store.insert(EmbeddingStore::new(vector.len())?)
                }
            };
            if vector.len() != store.dimension {
                return Err(BiasError::Dimension {
                    line: line_no,
                    expected: store.dimension,
                    found: vector.len(),
                });
            }
            store.vectors.insert(token.to_lowercase(), vector);
        }
        store.ok_or(BiasError::NoVectors)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BiasError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| BiasError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn insert(&mut self, token: &str, vector: Vec<f64>) -> Result<(), BiasError> {
        if vector.len() != self.dimension {
            return Err(BiasError::DimensionMismatch(self.dimension, vector.len()));
        }
        self.vectors.insert(token.to_lowercase(), vector);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// `1 - cos(u, v)`, clamped to `[0, 2]`. A zero vector on either side gives
/// 1; identical nonzero vectors give exactly 0.
pub fn cosine_distance(u: &[f64], v: &[f64]) -> Result<f64, BiasError> {
    if u.len() != v.len() {
        return Err(BiasError::DimensionMismatch(u.len(), v.len()));
    }
    if u == v && u.iter().any(|&x| x != 0.0) {
        return Ok(0.0);
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Ok(1.0);
    }
    Ok((1.0 - dot / (nu * nv)).clamp(0.0, 2.0))
}
