//! Corpus tooling for predicate-argument augmentation, adversarial
//! evaluation set generation, lexical-overlap bias diagnostics and
//! multi-seed scoring.

pub mod corpus;
pub mod augment;
pub mod adversarial;
pub mod biasmodel;
pub mod evalharness;
pub mod cli;
