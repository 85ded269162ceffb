use std::fs::File;
use std::io::{BufRead, BufReader, Lines, Write};
use std::marker::PhantomData;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    AnnotatedSentence, AnnotationStore, CorpusError, McExample, NliExample, NliLabel,
    StoreInsertError,
};

/// A record type that can be parsed from one JSON Lines line.
pub trait FromJsonLine: Sized {
    fn from_json_line(line: &str, line_no: usize) -> Result<Self, CorpusError>;
}

#[derive(Deserialize)]
struct RawNli {
    id: String,
    premise: String,
    hypothesis: String,
    label: String,
}

impl FromJsonLine for NliExample {
    fn from_json_line(line: &str, line_no: usize) -> Result<Self, CorpusError> {
        let raw: RawNli = parse(line, line_no)?;
        let label = raw
            .label
            .parse::<NliLabel>()
            .map_err(|value| CorpusError::UnknownLabel {
                line: line_no,
                value,
            })?;
        Ok(NliExample {
            id: raw.id,
            premise: raw.premise,
            hypothesis: raw.hypothesis,
            label,
        })
    }
}

impl FromJsonLine for McExample {
    fn from_json_line(line: &str, line_no: usize) -> Result<Self, CorpusError> {
        let ex: McExample = parse(line, line_no)?;
        if ex.endings.len() < 2 {
            return Err(CorpusError::TooFewEndings {
                line: line_no,
                count: ex.endings.len(),
            });
        }
        if ex.gold_index >= ex.endings.len() {
            return Err(CorpusError::GoldIndexOutOfBounds {
                line: line_no,
                gold_index: ex.gold_index,
                endings: ex.endings.len(),
            });
        }
        Ok(ex)
    }
}

impl FromJsonLine for AnnotatedSentence {
    fn from_json_line(line: &str, line_no: usize) -> Result<Self, CorpusError> {
        let s: AnnotatedSentence = parse(line, line_no)?;
        s.validate()
            .map_err(|source| CorpusError::InvalidSentence {
                line: line_no,
                source,
            })?;
        Ok(s)
    }
}

fn parse<'a, T: Deserialize<'a>>(line: &'a str, line_no: usize) -> Result<T, CorpusError> {
    serde_json::from_str(line).map_err(|source| CorpusError::Malformed {
        line: line_no,
        source,
    })
}

/// Streaming reader over a JSON Lines file. Blank lines are skipped but
/// still counted for error line numbers.
pub struct Records<T> {
    path: String,
    lines: Lines<BufReader<File>>,
    line_no: usize,
    _record: PhantomData<T>,
}

impl<T: FromJsonLine> Iterator for Records<T> {
    type Item = Result<T, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = self.lines.next()?;
            self.line_no += 1;
            let line = match line {
                Ok(l) => l,
                Err(source) => {
                    return Some(Err(CorpusError::Io {
                        path: self.path.clone(),
                        source,
                    }))
                }
            };
            if line.trim().is_empty() {
                continue;
            }
            return Some(T::from_json_line(&line, self.line_no));
        }
    }
}

pub fn read_jsonl<T: FromJsonLine>(path: impl AsRef<Path>) -> Result<Records<T>, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(Records {
        path: path.display().to_string(),
        lines: BufReader::new(file).lines(),
        line_no: 0,
        _record: PhantomData,
    })
}

pub fn read_nli_jsonl(path: impl AsRef<Path>) -> Result<Records<NliExample>, CorpusError> {
    read_jsonl(path)
}

pub fn read_mc_jsonl(path: impl AsRef<Path>) -> Result<Records<McExample>, CorpusError> {
    read_jsonl(path)
}

/// Loads and validates a whole annotation file.
pub fn read_annotations(path: impl AsRef<Path>) -> Result<AnnotationStore, CorpusError> {
    let mut store = AnnotationStore::new();
    let mut records = read_jsonl::<AnnotatedSentence>(path)?;
    while let Some(sentence) = records.next() {
        let line = records.line_no;
        store.insert(sentence?).map_err(|e| match e {
            StoreInsertError::Duplicate(id) => CorpusError::DuplicateId { line, id },
            StoreInsertError::Invalid(source) => CorpusError::InvalidSentence { line, source },
        })?;
    }
    Ok(store)
}

/// Writes one compact JSON object per line, fields in declaration order.
pub fn write_jsonl<'a, W, T, I>(mut out: W, records: I) -> std::io::Result<()>
where
    W: Write,
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
