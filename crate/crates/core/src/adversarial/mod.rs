//! Adversarial evaluation set generators and the HANS heuristic tagger.
//!
//! Stress generators append tautologies to NLI pairs. The multiple-choice
//! generators (`syntax_swap`, `antonym`, `ne_swap`) build a new incorrect
//! ending with high lexical overlap to the premise and put it in place of
//! one existing incorrect ending.

mod antonym;
mod hans;
mod ne;
mod resources;
mod stress;
mod swap;

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{McExample, NliExample};

pub use self::antonym::gen_antonym;
pub use self::hans::{tag_hans_heuristics, tag_pair_normalized, HeuristicTags};
pub use self::ne::gen_ne_swap;
pub use self::resources::{AntonymLexicon, NePool, ResourceError};
pub use self::stress::{
    append_tautology, gen_stress_length, gen_stress_negation, gen_stress_overlap,
    NEGATION_TAUTOLOGY, OVERLAP_TAUTOLOGY,
};
pub use self::swap::{gen_syntax_swap, swap_subject_object, SwapRelations};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    SyntaxSwap,
    Antonym,
    NeSwap,
    Negation,
    WordOverlap,
    LengthMismatch,
}

impl Provenance {
    pub const ALL: [Provenance; 6] = [
        Provenance::SyntaxSwap,
        Provenance::Antonym,
        Provenance::NeSwap,
        Provenance::Negation,
        Provenance::WordOverlap,
        Provenance::LengthMismatch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::SyntaxSwap => "syntax_swap",
            Provenance::Antonym => "antonym",
            Provenance::NeSwap => "ne_swap",
            Provenance::Negation => "negation",
            Provenance::WordOverlap => "word_overlap",
            Provenance::LengthMismatch => "length_mismatch",
        }
    }

    /// True for generators that replace an ending of a multiple-choice example.
    pub fn replaces_ending(self) -> bool {
        matches!(
            self,
            Provenance::SyntaxSwap | Provenance::Antonym | Provenance::NeSwap
        )
    }

    /// Suffix appended to the source id.
    pub fn id_suffix(self) -> &'static str {
        match self {
            Provenance::SyntaxSwap => "::syn",
            Provenance::Antonym => "::ant",
            Provenance::NeSwap => "::ne",
            Provenance::Negation => "::neg",
            Provenance::WordOverlap => "::ovl",
            Provenance::LengthMismatch => "::len",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Provenance::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown generator {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratedExample {
    Nli(NliExample),
    Mc(McExample),
}

/// One generated example. Serializes as the input schema plus
/// `provenance`, `replaced_index` and `source_id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenOutcome {
    #[serde(flatten)]
    pub example: GeneratedExample,
    pub provenance: Provenance,
    pub replaced_index: Option<usize>,
    pub source_id: String,
}

impl GenOutcome {
    pub fn stress(example: NliExample, provenance: Provenance, source_id: &str) -> Self {
        GenOutcome {
            example: GeneratedExample::Nli(example),
            provenance,
            replaced_index: None,
            source_id: source_id.to_string(),
        }
    }

    pub fn mc(&self) -> Option<&McExample> {
        match &self.example {
            GeneratedExample::Mc(m) => Some(m),
            GeneratedExample::Nli(_) => None,
        }
    }

    pub fn nli(&self) -> Option<&NliExample> {
        match &self.example {
            GeneratedExample::Nli(n) => Some(n),
            GeneratedExample::Mc(_) => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("premise of {id:?} has no dependency annotation")]
    MissingDependencies { id: String },
    #[error("premise of {id:?} has no named-entity annotation")]
    MissingEntities { id: String },
}

/// Random stream for one example, derived from the run seed, the generator
/// name and the example id only, so results do not depend on processing
/// order.
pub fn example_rng(seed: u64, stream: &str, example_id: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(stream.as_bytes());
    h.update([0u8]);
    h.update(example_id.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    ChaCha8Rng::seed_from_u64(u64::from_le_bytes(bytes))
}

/// Puts `new_ending` in place of a uniformly chosen incorrect ending.
pub(crate) fn replace_negative_ending(
    ex: &McExample,
    new_ending: String,
    provenance: Provenance,
    seed: u64,
) -> Option<GenOutcome> {
    let negatives: Vec<usize> = (0..ex.endings.len())
        .filter(|&i| i != ex.gold_index)
        .collect();
    let mut rng = example_rng(seed, provenance.as_str(), &ex.id);
    let &replaced = negatives.choose(&mut rng)?;

    let mut out = ex.clone();
    out.id = format!("{}{}", ex.id, provenance.id_suffix());
    out.endings[replaced] = new_ending;
    Some(GenOutcome {
        example: GeneratedExample::Mc(out),
        provenance,
        replaced_index: Some(replaced),
        source_id: ex.id.clone(),
    })
}

/// Copies the case pattern of `model` onto `word`: all caps, leading
/// capital, or unchanged.
pub(crate) fn match_case(word: &str, model: &str) -> String {
    let letters: Vec<char> = model.chars().filter(|c| c.is_alphabetic()).collect();
    if letters.len() > 1 && letters.iter().all(|c| c.is_uppercase()) {
        return word.to_uppercase();
    }
    match model.chars().next() {
        Some(c) if c.is_uppercase() => set_initial_case(word, true),
        _ => word.to_string(),
    }
}

pub(crate) fn set_initial_case(word: &str, upper: bool) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => {
            let head: String = if upper {
                first.to_uppercase().collect()
            } else {
                first.to_lowercase().collect()
            };
            head + chars.as_str()
        }
        None => String::new(),
    }
}
