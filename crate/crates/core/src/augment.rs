//! Appends predicate-argument markup to sentences.
//!
//! Each frame becomes `[PRD] <predicate> [AG0] <arg0> [AG1] <arg1> [PRE]`,
//! with the argument segments omitted when the frame has no such argument.

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{
    sentence_key, AnnotatedSentence, AnnotationStore, McExample, NliExample, SentenceField,
    SrlFrame,
};

pub const PRD: &str = "[PRD]";
pub const AG0: &str = "[AG0]";
pub const AG1: &str = "[AG1]";
pub const PRE: &str = "[PRE]";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Targets {
    PremiseOnly,
    HypothesisOnly,
    #[default]
    Both,
}

impl Targets {
    fn premise(self) -> bool {
        matches!(self, Targets::PremiseOnly | Targets::Both)
    }

    /// Hypothesis for NLI, every ending for MC.
    fn second(self) -> bool {
        matches!(self, Targets::HypothesisOnly | Targets::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OnMissing {
    #[default]
    Skip,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentPolicy {
    pub max_frames: usize,
    pub targets: Targets,
    pub segment_separator: String,
    pub on_missing: OnMissing,
}

impl Default for AugmentPolicy {
    fn default() -> Self {
        AugmentPolicy {
            max_frames: 3,
            targets: Targets::Both,
            segment_separator: " ".to_string(),
            on_missing: OnMissing::Skip,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("example {example_id:?}: no annotation for sentence {key:?}")]
pub struct MissingAnnotation {
    pub example_id: String,
    pub key: String,
}

/// Sidecar counts of one augmentation run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentSummary {
    pub examples: usize,
    pub augmented: usize,
    pub skipped_missing_annotation: usize,
}

pub fn render_frame(frame: &SrlFrame, sentence: &AnnotatedSentence) -> String {
    let mut out = format!("{PRD} {}", sentence.join_tokens(frame.predicate));
    if let Some(arg0) = frame.arg0 {
        out.push_str(&format!(" {AG0} {}", sentence.join_tokens(arg0)));
    }
    if let Some(arg1) = frame.arg1 {
        out.push_str(&format!(" {AG1} {}", sentence.join_tokens(arg1)));
    }
    out.push(' ');
    out.push_str(PRE);
    out
}

/// Original text followed by the first `max_frames` frames in rank order.
pub fn augment_sentence(sentence: &AnnotatedSentence, policy: &AugmentPolicy) -> String {
    augment_text(&sentence.text, sentence, policy)
}

fn augment_text(text: &str, sentence: &AnnotatedSentence, policy: &AugmentPolicy) -> String {
    let mut out = text.to_string();
    for frame in sentence.frames_by_order().into_iter().take(policy.max_frames) {
        out.push_str(&policy.segment_separator);
        out.push_str(&render_frame(frame, sentence));
    }
    out
}

/// An example whose sentences can be looked up and rewritten in place.
pub trait Augmentable: Clone {
    fn id(&self) -> &str;

    /// Targeted fields with their current text.
    fn targets(&self, targets: Targets) -> Vec<(SentenceField, &str)>;

    fn set_field(&mut self, field: SentenceField, text: String);
}

impl Augmentable for NliExample {
    fn id(&self) -> &str {
        &self.id
    }

    fn targets(&self, targets: Targets) -> Vec<(SentenceField, &str)> {
        let mut out = Vec::new();
        if targets.premise() {
            out.push((SentenceField::Premise, self.premise.as_str()));
        }
        if targets.second() {
            out.push((SentenceField::Hypothesis, self.hypothesis.as_str()));
        }
        out
    }

    fn set_field(&mut self, field: SentenceField, text: String) {
        match field {
            SentenceField::Premise => self.premise = text,
            SentenceField::Hypothesis => self.hypothesis = text,
            SentenceField::Ending(_) => unreachable!("NLI examples have no endings"),
        }
    }
}

impl Augmentable for McExample {
    fn id(&self) -> &str {
        &self.id
    }

    fn targets(&self, targets: Targets) -> Vec<(SentenceField, &str)> {
        let mut out = Vec::new();
        if targets.premise() {
            out.push((SentenceField::Premise, self.premise.as_str()));
        }
        if targets.second() {
            for (i, e) in self.endings.iter().enumerate() {
                out.push((SentenceField::Ending(i), e.as_str()));
            }
        }
        out
    }

    fn set_field(&mut self, field: SentenceField, text: String) {
        match field {
            SentenceField::Premise => self.premise = text,
            SentenceField::Ending(i) => self.endings[i] = text,
            SentenceField::Hypothesis => unreachable!("MC examples have no hypothesis"),
        }
    }
}

/// Outcome for one example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Augmented<T> {
    Done(T),
    /// Left untouched because at least one targeted sentence had no annotation.
    Skipped(T, MissingAnnotation),
}

impl<T> Augmented<T> {
    pub fn into_inner(self) -> T {
        match self {
            Augmented::Done(t) | Augmented::Skipped(t, _) => t,
        }
    }
}

/// Augments every targeted sentence of one example, or none of them when an
/// annotation is missing.
pub fn augment_example<T: Augmentable>(
    example: &T,
    store: &AnnotationStore,
    policy: &AugmentPolicy,
) -> Augmented<T> {
    let mut rewrites = Vec::new();
    for (field, text) in example.targets(policy.targets) {
        let key = sentence_key(example.id(), field);
        match store.resolve(&key, text) {
            Some(sentence) => rewrites.push((field, augment_text(text, sentence, policy))),
            None => {
                return Augmented::Skipped(
                    example.clone(),
                    MissingAnnotation {
                        example_id: example.id().to_string(),
                        key,
                    },
                )
            }
        }
    }
    let mut out = example.clone();
    for (field, text) in rewrites {
        out.set_field(field, text);
    }
    Augmented::Done(out)
}

/// Augments a whole dataset. Output order equals input order.
pub fn augment_dataset<T: Augmentable + Send + Sync>(
    dataset: &[T],
    store: &AnnotationStore,
    policy: &AugmentPolicy,
) -> Result<(Vec<T>, AugmentSummary), MissingAnnotation> {
    use rayon::prelude::*;

    let results: Vec<Augmented<T>> = dataset
        .par_iter()
        .map(|ex| augment_example(ex, store, policy))
        .collect();

    let mut summary = AugmentSummary {
        examples: dataset.len(),
        ..Default::default()
    };
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Augmented::Done(ex) => {
                summary.augmented += 1;
                out.push(ex);
            }
            Augmented::Skipped(ex, missing) => {
                if policy.on_missing == OnMissing::Fail {
                    return Err(missing);
                }
                warn!("{missing}; example left unaugmented");
                summary.skipped_missing_annotation += 1;
                out.push(ex);
            }
        }
    }
    Ok((out, summary))
}
