use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    extract_overlap_features, predict_mc, train_bias_classifier, BiasError, EmbeddingStore,
    FeatureConfig, FeatureVector, Hyper, IMPLAUSIBLE, PLAUSIBLE,
};
use crate::corpus::{sentence_key, tokenize, AnnotationStore, McExample, NliExample, SentenceField};

#[derive(Debug, Clone)]
pub enum BiasDataset {
    Nli(Vec<NliExample>),
    Mc(Vec<McExample>),
}

impl BiasDataset {
    pub fn len(&self) -> usize {
        match self {
            BiasDataset::Nli(v) => v.len(),
            BiasDataset::Mc(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticConfig {
    pub hyper: Hyper,
    pub features: FeatureConfig,
    /// Fraction of examples used for training.
    pub split_ratio: f64,
    /// Drives the split and the classifier; overrides `hyper.seed`.
    pub seed: u64,
    pub margin: f64,
}

impl Default for DiagnosticConfig {
    fn default() -> Self {
        DiagnosticConfig {
            hyper: Hyper::default(),
            features: FeatureConfig::default(),
            split_ratio: 0.8,
            seed: 0,
            margin: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub accuracy: f64,
    pub chance: f64,
    pub margin: f64,
    pub flagged: bool,
    pub n_train: usize,
    pub n_eval: usize,
    pub seed: u64,
    pub gap: f64,
    /// Pairs whose hypothesis (or ending) was empty after normalization.
    pub empty_hypotheses: usize,
}

struct Tokenizer<'a> {
    annotations: Option<&'a AnnotationStore>,
}

impl Tokenizer<'_> {
    /// Annotated tokens when the store has this sentence, else the built-in
    /// tokenizer over the raw text.
    fn tokens(&self, id: &str, field: SentenceField, text: &str) -> Vec<String> {
        if let Some(s) = self
            .annotations
            .and_then(|a| a.resolve(&sentence_key(id, field), text))
        {
            return s.tokens.iter().map(|t| t.text.clone()).collect();
        }
        tokenize(text).into_iter().map(|t| t.text).collect()
    }
}

fn split(n: usize, ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>), BiasError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(BiasError::Config(format!("split ratio {ratio} not in (0, 1)")));
    }
    if n < 2 {
        return Err(BiasError::Config(format!("need at least 2 examples to split, got {n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((n as f64 * ratio).round() as usize).clamp(1, n - 1);
    let eval = order.split_off(n_train);
    Ok((order, eval))
}

/// Trains the overlap-only classifier on a seeded split of `dataset` and
/// reports how far its held-out accuracy lands above chance.
pub fn bias_score(
    dataset: &BiasDataset,
    annotations: Option<&AnnotationStore>,
    store: &EmbeddingStore,
    cfg: &DiagnosticConfig,
) -> Result<BiasReport, BiasError> {
    if dataset.is_empty() {
        return Err(BiasError::EmptyData);
    }
    let tok = Tokenizer { annotations };
    let hyper = Hyper { seed: cfg.seed, ..cfg.hyper };
    let (train_idx, eval_idx) = split(dataset.len(), cfg.split_ratio, cfg.seed)?;

    let (accuracy, chance, empty_hypotheses) = match dataset {
        BiasDataset::Nli(examples) => {
            let rows: Vec<(FeatureVector, usize, bool)> = examples
                .par_iter()
                .map(|ex| {
                    let p = tok.tokens(&ex.id, SentenceField::Premise, &ex.premise);
                    let h = tok.tokens(&ex.id, SentenceField::Hypothesis, &ex.hypothesis);
                    let e = extract_overlap_features(&p, &h, store, cfg.features);
                    (e.features, ex.label.index(), e.empty_hypothesis)
                })
                .collect();
            let empty = rows.iter().filter(|r| r.2).count();
            let train: Vec<(FeatureVector, usize)> =
                train_idx.iter().map(|&i| (rows[i].0, rows[i].1)).collect();
            let clf = train_bias_classifier(&train, 3, &hyper)?;
            let correct = eval_idx
                .iter()
                .filter(|&&i| clf.predict(&rows[i].0) == rows[i].1)
                .count();
            (correct as f64 / eval_idx.len() as f64, 1.0 / 3.0, empty)
        }
        BiasDataset::Mc(examples) => {
            let tokenized: Vec<(Vec<String>, Vec<Vec<String>>)> = examples
                .par_iter()
                .map(|ex| {
                    let p = tok.tokens(&ex.id, SentenceField::Premise, &ex.premise);
                    let es = ex
                        .endings
                        .iter()
                        .enumerate()
                        .map(|(i, e)| tok.tokens(&ex.id, SentenceField::Ending(i), e))
                        .collect();
                    (p, es)
                })
                .collect();
            let per_example: Vec<Vec<(FeatureVector, bool)>> = tokenized
                .par_iter()
                .map(|(p, es)| {
                    es.iter()
                        .map(|e| {
                            let x = extract_overlap_features(p, e, store, cfg.features);
                            (x.features, x.empty_hypothesis)
                        })
                        .collect()
                })
                .collect();
            let empty = per_example.iter().flatten().filter(|r| r.1).count();
            let train: Vec<(FeatureVector, usize)> = train_idx
                .iter()
                .flat_map(|&i| {
                    let gold = examples[i].gold_index;
                    per_example[i].iter().enumerate().map(move |(j, (fv, _))| {
                        (*fv, if j == gold { PLAUSIBLE } else { IMPLAUSIBLE })
                    })
                })
                .collect();
            let clf = train_bias_classifier(&train, 2, &hyper)?;
            let mut correct = 0usize;
            let mut chance = 0.0;
            for &i in &eval_idx {
                let (p, es) = &tokenized[i];
                if predict_mc(&clf, p, es, store, cfg.features)? == examples[i].gold_index {
                    correct += 1;
                }
                chance += 1.0 / es.len() as f64;
            }
            let n = eval_idx.len() as f64;
            (correct as f64 / n, chance / n, empty)
        }
    };

    let gap = accuracy - chance;
    Ok(BiasReport {
        accuracy,
        chance,
        margin: cfg.margin,
        flagged: gap > cfg.margin,
        n_train: train_idx.len(),
        n_eval: eval_idx.len(),
        seed: cfg.seed,
        gap,
        empty_hypotheses,
    })
}
