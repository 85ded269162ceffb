//! Scoring of prediction files against gold data, multi-seed aggregation
//! and per-subset breakdowns.

mod report;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{McExample, NliExample, NliLabel};

pub use self::report::{render_report, ReportFormat, ReportRow, RunReport, STD_CONVENTION};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("predictions missing for {} gold id(s): {}", .0.len(), .0.join(", "))]
    MissingIds(Vec<String>),
    #[error("id {id:?}: prediction is {found} but gold is {expected}")]
    TypeMismatch {
        id: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("gold set is empty")]
    EmptyGold,
    #[error("no seed accuracies to aggregate")]
    NoSeeds,
}

/// A predicted NLI label or a predicted ending index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Prediction {
    Index(usize),
    Label(NliLabel),
}

impl Prediction {
    fn kind(&self) -> &'static str {
        match self {
            Prediction::Index(_) => "an index",
            Prediction::Label(_) => "a label",
        }
    }
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prediction::Index(i) => write!(f, "{i}"),
            Prediction::Label(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionFile {
    pub model_name: String,
    pub seed: u64,
    pub entries: BTreeMap<String, Prediction>,
}

#[derive(Deserialize)]
struct RawPrediction {
    id: String,
    prediction: serde_json::Value,
}

fn parse_prediction(value: serde_json::Value, line: usize) -> Result<Prediction, EvalError> {
    let malformed = |message: String| EvalError::Malformed { line, message };
    match value {
        serde_json::Value::String(s) => s
            .parse::<NliLabel>()
            .map(Prediction::Label)
            .map_err(|v| malformed(format!("unknown label {v:?}"))),
        serde_json::Value::Number(n) => n
            .as_u64()
            .and_then(|i| usize::try_from(i).ok())
            .map(Prediction::Index)
            .ok_or_else(|| malformed(format!("prediction {n} is not a non-negative index"))),
        other => Err(malformed(format!("prediction must be a string or an integer, got {other}"))),
    }
}

impl PredictionFile {
    pub fn new(model_name: impl Into<String>, seed: u64) -> Self {
        PredictionFile {
            model_name: model_name.into(),
            seed,
            entries: BTreeMap::new(),
        }
    }

    /// Parses `{"id": ..., "prediction": ...}` lines; blank lines are skipped.
    pub fn parse(text: &str, model_name: impl Into<String>, seed: u64) -> Result<Self, EvalError> {
        let mut file = PredictionFile::new(model_name, seed);
        for (i, line) in text.lines().enumerate() {
            file.push_line(line, i + 1)?;
        }
        Ok(file)
    }

    pub fn load(path: impl AsRef<Path>, model_name: impl Into<String>, seed: u64) -> Result<Self, EvalError> {
        let path = path.as_ref();
        let io_err = |e: std::io::Error| EvalError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let reader = BufReader::new(File::open(path).map_err(io_err)?);
        let mut file = PredictionFile::new(model_name, seed);
        for (i, line) in reader.lines().enumerate() {
            file.push_line(&line.map_err(io_err)?, i + 1)?;
        }
        Ok(file)
    }

    fn push_line(&mut self, line: &str, line_no: usize) -> Result<(), EvalError> {
        if line.trim().is_empty() {
            return Ok(());
        }
        let raw: RawPrediction = serde_json::from_str(line).map_err(|e| EvalError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let prediction = parse_prediction(raw.prediction, line_no)?;
        if self.entries.contains_key(&raw.id) {
            return Err(EvalError::DuplicateId { line: line_no, id: raw.id });
        }
        self.entries.insert(raw.id, prediction);
        Ok(())
    }
}

/// Gold answers keyed by example id.
pub type GoldSet = BTreeMap<String, Prediction>;

pub fn gold_from_nli(examples: &[NliExample]) -> GoldSet {
    examples
        .iter()
        .map(|e| (e.id.clone(), Prediction::Label(e.label)))
        .collect()
}

pub fn gold_from_mc(examples: &[McExample]) -> GoldSet {
    examples
        .iter()
        .map(|e| (e.id.clone(), Prediction::Index(e.gold_index)))
        .collect()
}

/// Per-id correctness over the gold set. Extra prediction ids are ignored.
fn judge<'g>(pred: &PredictionFile, gold: &'g GoldSet) -> Result<Vec<(&'g str, bool)>, EvalError> {
    if gold.is_empty() {
        return Err(EvalError::EmptyGold);
    }
    let missing: Vec<String> = gold
        .keys()
        .filter(|id| !pred.entries.contains_key(*id))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(EvalError::MissingIds(missing));
    }
    gold.iter()
        .map(|(id, g)| {
            let p = &pred.entries[id];
            if std::mem::discriminant(p) != std::mem::discriminant(g) {
                return Err(EvalError::TypeMismatch {
                    id: id.clone(),
                    expected: g.kind(),
                    found: p.kind(),
                });
            }
            Ok((id.as_str(), p == g))
        })
        .collect()
}

pub fn accuracy(pred: &PredictionFile, gold: &GoldSet) -> Result<f64, EvalError> {
    let judged = judge(pred, gold)?;
    Ok(judged.iter().filter(|(_, ok)| *ok).count() as f64 / judged.len() as f64)
}

/// Mean and population standard deviation.
pub fn aggregate_seeds(accs: &[f64]) -> Result<(f64, f64), EvalError> {
    if accs.is_empty() {
        return Err(EvalError::NoSeeds);
    }
    let n = accs.len() as f64;
    let mean = accs.iter().sum::<f64>() / n;
    let var = accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetScore {
    pub accuracy: f64,
    pub count: usize,
}

pub const UNTAGGED_SUBSET: &str = "other";

/// Accuracy within each tagged subset; gold ids without a tag count toward
/// `"other"`.
pub fn subset_breakdown(
    pred: &PredictionFile,
    gold: &GoldSet,
    tags: &HashMap<String, String>,
) -> Result<BTreeMap<String, SubsetScore>, EvalError> {
    let mut tally: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (id, ok) in judge(pred, gold)? {
        let subset = tags.get(id).map_or(UNTAGGED_SUBSET, String::as_str);
        let t = tally.entry(subset.to_string()).or_default();
        t.0 += usize::from(ok);
        t.1 += 1;
    }
    Ok(tally
        .into_iter()
        .map(|(k, (correct, count))| {
            (
                k,
                SubsetScore {
                    accuracy: correct as f64 / count as f64,
                    count,
                },
            )
        })
        .collect())
}
