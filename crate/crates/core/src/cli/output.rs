use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a C,
    inputs: &'a [FileDigest],
    outputs: &'a [FileDigest],
    counts: &'a BTreeMap<String, u64>,
    /// Seconds since the Unix epoch. The only field that varies between
    /// identical runs.
    created_at: u64,
}

/// Output files of one run. Everything goes to temporary files in the
/// output directory first; nothing appears under its final name until
/// [`Staging::commit`] succeeds for every file.
pub struct Staging {
    dir: PathBuf,
    files: Vec<(PathBuf, NamedTempFile)>,
    inputs: Vec<FileDigest>,
    counts: BTreeMap<String, u64>,
}

impl Staging {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Staging {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            inputs: Vec::new(),
            counts: BTreeMap::new(),
        })
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    pub fn count(&mut self, name: &str, value: usize) {
        self.counts.insert(name.to_string(), value as u64);
    }

    pub fn write(&mut self, name: &str, write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
        let mut tmp = NamedTempFile::new_in(&self.dir)
            .with_context(|| format!("creating temporary file in {}", self.dir.display()))?;
        {
            let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
            write(&mut buf).and_then(|_| buf.flush())
        }
        .with_context(|| format!("writing {name}"))?;
        self.files.push((self.dir.join(name), tmp));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n")
        })
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        self.write(name, |w| w.write_all(text.as_bytes()))
    }

    /// Writes the manifest and moves every staged file into place.
    pub fn commit<C: Serialize>(mut self, command: &str, config: &C) -> Result<Vec<PathBuf>> {
        let outputs = self
            .files
            .iter()
            .map(|(path, tmp)| {
                Ok(FileDigest {
                    path: path.display().to_string(),
                    sha256: sha256_file(tmp.path())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let created_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let inputs = std::mem::take(&mut self.inputs);
        let counts = std::mem::take(&mut self.counts);
        let manifest = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            inputs: &inputs,
            outputs: &outputs,
            counts: &counts,
            created_at,
        };
        self.write_json(MANIFEST_FILE, &manifest)?;

        let mut written = Vec::new();
        for (path, tmp) in self.files {
            tmp.persist(&path)
                .with_context(|| format!("moving output into {}", path.display()))?;
            written.push(path);
        }
        Ok(written)
    }
}
