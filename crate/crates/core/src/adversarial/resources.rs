use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected two tab-separated columns")]
    Columns { path: String, line: usize },
}

fn tsv_rows(path: &Path) -> Result<Vec<(usize, String, String)>, ResourceError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| ResourceError::Io {
        path: shown.clone(),
        source,
    })?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (a, b) = line.split_once('\t').ok_or_else(|| ResourceError::Columns {
            path: shown.clone(),
            line: i + 1,
        })?;
        if a.trim().is_empty() || b.trim().is_empty() {
            return Err(ResourceError::Columns {
                path: shown,
                line: i + 1,
            });
        }
        rows.push((i + 1, a.trim().to_string(), b.trim().to_string()));
    }
    Ok(rows)
}

/// Lemma to antonyms, in file order. Lemmas are lowercased.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AntonymLexicon {
    entries: HashMap<String, Vec<String>>,
}

impl AntonymLexicon {
    /// Reads `lemma<TAB>antonym1,antonym2,...` lines. A repeated lemma
    /// extends its list.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let mut lex = AntonymLexicon::default();
        for (_, lemma, list) in tsv_rows(path.as_ref())? {
            lex.add(&lemma, list.split(',').map(str::trim).filter(|a| !a.is_empty()));
        }
        Ok(lex)
    }

    pub fn add<'a>(&mut self, lemma: &str, antonyms: impl IntoIterator<Item = &'a str>) {
        self.entries
            .entry(lemma.to_lowercase())
            .or_default()
            .extend(antonyms.into_iter().map(str::to_string));
    }

    pub fn antonyms(&self, lemma: &str) -> &[String] {
        self.entries.get(lemma).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Replacement entities, grouped by type in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NePool {
    by_type: HashMap<String, Vec<String>>,
}

impl NePool {
    /// Reads `entity_text<TAB>ENTITY_TYPE` lines.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let mut pool = NePool::default();
        for (_, text, ty) in tsv_rows(path.as_ref())? {
            pool.add(&text, &ty);
        }
        Ok(pool)
    }

    pub fn from_entries<'a>(entries: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut pool = NePool::default();
        for (text, ty) in entries {
            pool.add(text, ty);
        }
        pool
    }

    pub fn add(&mut self, text: &str, entity_type: &str) {
        self.by_type
            .entry(entity_type.to_string())
            .or_default()
            .push(text.to_string());
    }

    pub fn of_type(&self, entity_type: &str) -> &[String] {
        self.by_type.get(entity_type).map_or(&[], Vec::as_slice)
    }
}
