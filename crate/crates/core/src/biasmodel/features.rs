use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{cosine_distance, EmbeddingStore};
use crate::corpus::is_punctuation;

pub const NUM_FEATURES: usize = 5;

/// Lowercased token, or `None` for pure punctuation.
pub fn normalize_token(token: &str) -> Option<String> {
    (!token.is_empty() && !is_punctuation(token)).then(|| token.to_lowercase())
}

pub fn normalize_tokens<S: AsRef<str>>(tokens: &[S]) -> Vec<String> {
    tokens
        .iter()
        .filter_map(|t| normalize_token(t.as_ref()))
        .collect()
}

/// How hypothesis/premise word-vector distances are paired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// Each hypothesis token against its nearest premise token.
    #[default]
    NearestPremise,
    /// Every hypothesis/premise token pair.
    AllPairs,
}

/// Whether the overlap fraction counts token types or occurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FractionMode {
    #[default]
    Types,
    Occurrences,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub distance: DistanceMode,
    pub fraction: FractionMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    pub all_in: f64,
    pub is_subsequence: f64,
    pub overlap_fraction: f64,
    pub max_cos_dist: f64,
    pub avg_cos_dist: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; NUM_FEATURES] {
        [
            self.all_in,
            self.is_subsequence,
            self.overlap_fraction,
            self.max_cos_dist,
            self.avg_cos_dist,
        ]
    }

    pub fn from_array(a: [f64; NUM_FEATURES]) -> Self {
        FeatureVector {
            all_in: a[0],
            is_subsequence: a[1],
            overlap_fraction: a[2],
            max_cos_dist: a[3],
            avg_cos_dist: a[4],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extraction {
    pub features: FeatureVector,
    /// The hypothesis had no tokens left after normalization; all features
    /// are zero.
    pub empty_hypothesis: bool,
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// The five overlap features of a premise/hypothesis pair. Tokens are
/// normalized here; hypothesis tokens without a vector are left out of the
/// distance aggregates.
pub fn extract_overlap_features<S: AsRef<str>>(
    premise: &[S],
    hypothesis: &[S],
    store: &EmbeddingStore,
    config: FeatureConfig,
) -> Extraction {
    let prem = normalize_tokens(premise);
    let hyp = normalize_tokens(hypothesis);
    if hyp.is_empty() {
        return Extraction {
            features: FeatureVector::default(),
            empty_hypothesis: true,
        };
    }

    let prem_set: HashSet<&str> = prem.iter().map(String::as_str).collect();
    let hyp_set: HashSet<&str> = hyp.iter().map(String::as_str).collect();
    let all_in = hyp_set.is_subset(&prem_set);
    let is_subsequence = prem.windows(hyp.len()).any(|w| w == hyp.as_slice());
    let overlap_fraction = match config.fraction {
        FractionMode::Types => {
            hyp_set.iter().filter(|h| prem_set.contains(*h)).count() as f64 / hyp_set.len() as f64
        }
        FractionMode::Occurrences => {
            hyp.iter().filter(|h| prem_set.contains(h.as_str())).count() as f64 / hyp.len() as f64
        }
    };

    let prem_vecs: Vec<&[f64]> = prem.iter().filter_map(|p| store.get(p)).collect();
    let mut distances = Vec::new();
    if !prem_vecs.is_empty() {
        for hv in hyp.iter().filter_map(|h| store.get(h)) {
            let ds = prem_vecs
                .iter()
                .map(|pv| cosine_distance(hv, pv).expect("store enforces one dimension"));
            match config.distance {
                DistanceMode::NearestPremise => distances.push(ds.fold(f64::INFINITY, f64::min)),
                DistanceMode::AllPairs => distances.extend(ds),
            }
        }
    }
    let (max_cos_dist, avg_cos_dist) = if distances.is_empty() {
        (0.0, 0.0)
    } else {
        let max = distances.iter().copied().fold(0.0, f64::max);
        let avg = distances.iter().sum::<f64>() / distances.len() as f64;
        // float summation can push the mean a hair past the max
        (max, avg.min(max))
    };

    Extraction {
        features: FeatureVector {
            all_in: flag(all_in),
            is_subsequence: flag(is_subsequence),
            overlap_fraction,
            max_cos_dist,
            avg_cos_dist,
        },
        empty_hypothesis: false,
    }
}
