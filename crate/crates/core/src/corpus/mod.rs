//! Dataset and annotation types, plus schema-validated JSON Lines I/O.
//!
//! All offsets stored on [`Token`] are character offsets into the owning
//! sentence text. Spans over tokens are half-open `[start, end)` and are
//! serialized as two-element arrays.

mod io;
mod tokenize;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::io::{
    read_annotations, read_jsonl, read_mc_jsonl, read_nli_jsonl, write_jsonl, FromJsonLine,
    Records,
};
pub use self::tokenize::{is_punctuation, tokenize};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {source}")]
    Malformed {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: unknown label {value:?}")]
    UnknownLabel { line: usize, value: String },
    #[error("line {line}: gold_index {gold_index} out of bounds for {endings} endings")]
    GoldIndexOutOfBounds {
        line: usize,
        gold_index: usize,
        endings: usize,
    },
    #[error("line {line}: expected at least 2 endings, found {count}")]
    TooFewEndings { line: usize, count: usize },
    #[error("line {line}: {source}")]
    InvalidSentence {
        line: usize,
        #[source]
        source: InvalidSentence,
    },
    #[error("line {line}: duplicate sentence id {id:?}")]
    DuplicateId { line: usize, id: String },
}

/// A sentence whose annotations violate the span/token invariants.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("sentence {id:?}: {reason}")]
pub struct InvalidSentence {
    pub id: String,
    pub reason: String,
}

/// Half-open token range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.start <= idx && idx < self.end
    }
}

impl From<(usize, usize)> for Span {
    fn from((start, end): (usize, usize)) -> Self {
        Span { start, end }
    }
}

impl From<Span> for (usize, usize) {
    fn from(s: Span) -> Self {
        (s.start, s.end)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn new(text: impl Into<String>, start: usize, end: usize) -> Self {
        Token {
            text: text.into(),
            start,
            end,
        }
    }
}

/// One predicate with its ARG0/ARG1 arguments. Other PropBank roles are not
/// carried.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrlFrame {
    pub predicate: Span,
    #[serde(default)]
    pub arg0: Option<Span>,
    #[serde(default)]
    pub arg1: Option<Span>,
    /// Detection rank within the sentence, 0-based.
    pub order: usize,
}

/// Dependency arc of one token. `head` is `None` for the root, serialized
/// as the sentinel `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "(i64, String)", into = "(i64, String)")]
pub struct DepArc {
    pub head: Option<usize>,
    pub label: String,
}

impl DepArc {
    pub fn new(head: Option<usize>, label: impl Into<String>) -> Self {
        DepArc {
            head,
            label: label.into(),
        }
    }
}

impl TryFrom<(i64, String)> for DepArc {
    type Error = String;

    fn try_from((head, label): (i64, String)) -> Result<Self, Self::Error> {
        match head {
            -1 => Ok(DepArc { head: None, label }),
            h if h >= 0 => Ok(DepArc {
                head: Some(h as usize),
                label,
            }),
            h => Err(format!("invalid head index {h}; the root sentinel is -1")),
        }
    }
}

impl From<DepArc> for (i64, String) {
    fn from(arc: DepArc) -> Self {
        (arc.head.map_or(-1, |h| h as i64), arc.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, String)", into = "(usize, usize, String)")]
pub struct NerSpan {
    pub span: Span,
    pub entity_type: String,
}

impl From<(usize, usize, String)> for NerSpan {
    fn from((start, end, entity_type): (usize, usize, String)) -> Self {
        NerSpan {
            span: Span::new(start, end),
            entity_type,
        }
    }
}

impl From<NerSpan> for (usize, usize, String) {
    fn from(n: NerSpan) -> Self {
        (n.span.start, n.span.end, n.entity_type)
    }
}

/// A tokenized sentence with its precomputed SRL, dependency, NER and
/// constituency annotations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedSentence {
    pub id: String,
    pub text: String,
    pub tokens: Vec<Token>,
    #[serde(default)]
    pub frames: Vec<SrlFrame>,
    #[serde(default)]
    pub dep_heads: Option<Vec<DepArc>>,
    #[serde(default, rename = "ner")]
    pub ner_spans: Option<Vec<NerSpan>>,
    #[serde(default)]
    pub constituents: Option<Vec<Span>>,
}

impl AnnotatedSentence {
    /// Builds an unannotated sentence using the corpus tokenizer.
    pub fn from_text(id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        AnnotatedSentence {
            id: id.into(),
            tokens: tokenize(&text),
            text,
            frames: Vec::new(),
            dep_heads: None,
            ner_spans: None,
            constituents: None,
        }
    }

    pub fn token_texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    /// Surface tokens of `span`, joined by single spaces.
    pub fn join_tokens(&self, span: Span) -> String {
        self.tokens[span.start..span.end]
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Character range of the source text covered by a non-empty token span.
    pub fn char_range(&self, span: Span) -> (usize, usize) {
        (self.tokens[span.start].start, self.tokens[span.end - 1].end)
    }

    /// Source text covered by a non-empty token span, original spacing kept.
    pub fn span_text(&self, span: Span) -> &str {
        let (s, e) = self.char_range(span);
        &self.text[byte_offset(&self.text, s)..byte_offset(&self.text, e)]
    }

    /// Frames sorted by detection rank.
    pub fn frames_by_order(&self) -> Vec<&SrlFrame> {
        let mut frames: Vec<&SrlFrame> = self.frames.iter().collect();
        frames.sort_by_key(|f| f.order);
        frames
    }

    /// Checks every token and span invariant.
    pub fn validate(&self) -> Result<(), InvalidSentence> {
        let fail = |reason: String| InvalidSentence {
            id: self.id.clone(),
            reason,
        };
        let n = self.tokens.len();
        let text_len = self.text.chars().count();

        let mut prev_end = 0;
        for (i, tok) in self.tokens.iter().enumerate() {
            if tok.start >= tok.end {
                return Err(fail(format!(
                    "token {i} has empty or inverted offsets {}..{}",
                    tok.start, tok.end
                )));
            }
            if tok.start < prev_end {
                return Err(fail(format!("token {i} overlaps or precedes token {}", i - 1)));
            }
            if tok.end > text_len {
                return Err(fail(format!(
                    "token {i} ends at {} beyond text length {text_len}",
                    tok.end
                )));
            }
            prev_end = tok.end;
        }

        let check_span = |what: &str, span: Span| -> Result<(), InvalidSentence> {
            if span.is_empty() {
                Err(fail(format!("{what} span {span} is empty")))
            } else if span.end > n {
                Err(fail(format!("{what} span {span} out of bounds for {n} tokens")))
            } else {
                Ok(())
            }
        };

        let mut orders: Vec<usize> = Vec::with_capacity(self.frames.len());
        for frame in &self.frames {
            check_span("predicate", frame.predicate)?;
            if let Some(a) = frame.arg0 {
                check_span("arg0", a)?;
            }
            if let Some(a) = frame.arg1 {
                check_span("arg1", a)?;
            }
            orders.push(frame.order);
        }
        orders.sort_unstable();
        if orders.iter().enumerate().any(|(i, &o)| i != o) {
            return Err(fail(format!(
                "frame orders {orders:?} are not unique and contiguous from 0"
            )));
        }

        if let Some(heads) = &self.dep_heads {
            if heads.len() != n {
                return Err(fail(format!(
                    "dep_heads has {} entries for {n} tokens",
                    heads.len()
                )));
            }
            for (i, arc) in heads.iter().enumerate() {
                if let Some(h) = arc.head {
                    if h >= n || h == i {
                        return Err(fail(format!("token {i} has invalid head {h}")));
                    }
                }
            }
        }
        if let Some(ner) = &self.ner_spans {
            for ent in ner {
                check_span("ner", ent.span)?;
            }
        }
        if let Some(cons) = &self.constituents {
            for &c in cons {
                check_span("constituent", c)?;
            }
        }
        Ok(())
    }
}

/// Byte offset of the `char_idx`-th character, or `text.len()` past the end.
pub fn byte_offset(text: &str, char_idx: usize) -> usize {
    text.char_indices()
        .nth(char_idx)
        .map_or(text.len(), |(b, _)| b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NliLabel {
    Entailment,
    Neutral,
    Contradiction,
}

impl NliLabel {
    pub const ALL: [NliLabel; 3] = [NliLabel::Entailment, NliLabel::Neutral, NliLabel::Contradiction];

    pub fn as_str(self) -> &'static str {
        match self {
            NliLabel::Entailment => "entailment",
            NliLabel::Neutral => "neutral",
            NliLabel::Contradiction => "contradiction",
        }
    }

    /// Class index used by classifiers.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(idx: usize) -> Option<Self> {
        Self::ALL.get(idx).copied()
    }
}

impl FromStr for NliLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "entailment" => Ok(NliLabel::Entailment),
            "neutral" => Ok(NliLabel::Neutral),
            "contradiction" => Ok(NliLabel::Contradiction),
            other => Err(other.to_string()),
        }
    }
}

impl fmt::Display for NliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NliExample {
    pub id: String,
    pub premise: String,
    pub hypothesis: String,
    pub label: NliLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct McExample {
    pub id: String,
    pub premise: String,
    pub endings: Vec<String>,
    pub gold_index: usize,
}

/// Which sentence of an example an annotation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SentenceField {
    Premise,
    Hypothesis,
    Ending(usize),
}

/// Annotation key of an example's sentence: `<example id>:premise`,
/// `<example id>:hypothesis` or `<example id>:ending<i>`.
pub fn sentence_key(example_id: &str, field: SentenceField) -> String {
    match field {
        SentenceField::Premise => format!("{example_id}:premise"),
        SentenceField::Hypothesis => format!("{example_id}:hypothesis"),
        SentenceField::Ending(i) => format!("{example_id}:ending{i}"),
    }
}

/// Validated annotations keyed by sentence id, with a secondary exact-text
/// index (first occurrence wins).
#[derive(Debug, Clone, Default)]
pub struct AnnotationStore {
    by_id: HashMap<String, AnnotatedSentence>,
    by_text: HashMap<String, String>,
}

impl AnnotationStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validates and inserts; duplicate ids are rejected.
    pub fn insert(&mut self, sentence: AnnotatedSentence) -> Result<(), StoreInsertError> {
        sentence.validate().map_err(StoreInsertError::Invalid)?;
        if self.by_id.contains_key(&sentence.id) {
            return Err(StoreInsertError::Duplicate(sentence.id));
        }
        self.by_text
            .entry(sentence.text.clone())
            .or_insert_with(|| sentence.id.clone());
        self.by_id.insert(sentence.id.clone(), sentence);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&AnnotatedSentence> {
        self.by_id.get(id)
    }

    pub fn by_text(&self, text: &str) -> Option<&AnnotatedSentence> {
        self.by_text.get(text).and_then(|id| self.by_id.get(id))
    }

    /// Finds the annotation for `text`: the keyed entry when its text
    /// matches, otherwise the first sentence with identical text.
    pub fn resolve(&self, key: &str, text: &str) -> Option<&AnnotatedSentence> {
        match self.by_id.get(key) {
            Some(s) if s.text == text => Some(s),
            _ => self.by_text(text),
        }
    }

    pub fn len(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &AnnotatedSentence> {
        self.by_id.values()
    }
}

#[derive(Debug, Error)]
pub enum StoreInsertError {
    #[error(transparent)]
    Invalid(InvalidSentence),
    #[error("duplicate sentence id {0:?}")]
    Duplicate(String),
}
