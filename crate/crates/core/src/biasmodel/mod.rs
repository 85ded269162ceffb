//! Lexical-overlap bias model: overlap features over a sentence pair, a
//! one-hidden-layer classifier trained on them, and a dataset-level
//! diagnostic that reports how far that classifier gets above chance.

mod classifier;
mod diagnostic;
mod embeddings;
mod features;

use thiserror::Error;

pub use self::classifier::{
    gradient_check, predict_mc, predict_nli, softmax, train_bias_classifier, BiasClassifier, Hyper, IMPLAUSIBLE,
    PLAUSIBLE,
};
pub use self::diagnostic::{bias_score, BiasDataset, BiasReport, DiagnosticConfig};
pub use self::embeddings::{cosine_distance, EmbeddingStore};
pub use self::features::{
    extract_overlap_features, normalize_token, normalize_tokens, DistanceMode, Extraction,
    FeatureConfig, FeatureVector, FractionMode, NUM_FEATURES,
};

#[derive(Debug, Error, PartialEq)]
pub enum BiasError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: expected dimension {expected}, found {found}")]
    Dimension {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: non-numeric component {value:?}")]
    NotNumeric { line: usize, value: String },
    #[error("embedding file has no vectors")]
    NoVectors,
    #[error("vector dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("training data is empty")]
    EmptyData,
    #[error("training data has a single class; at least 2 are required")]
    SingleClass,
    #[error("class {class} out of range for {classes} classes")]
    ClassOutOfRange { class: usize, classes: usize },
    #[error("classifier has {found} classes, expected {expected}")]
    ClassMismatch { expected: usize, found: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}
