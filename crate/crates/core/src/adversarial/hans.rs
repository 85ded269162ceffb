use serde::{Deserialize, Serialize};

use crate::biasmodel::normalize_token;
use crate::corpus::Span;

/// Which HANS overlap heuristics a sentence pair satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeuristicTags {
    pub lexical_overlap: bool,
    pub subsequence: bool,
    /// `None` when the premise has no constituency annotation.
    pub constituent: Option<bool>,
}

impl HeuristicTags {
    /// Most specific satisfied heuristic, `"other"` when none holds.
    pub fn subset_name(&self) -> &'static str {
        if self.constituent == Some(true) {
            "constituent"
        } else if self.subsequence {
            "subsequence"
        } else if self.lexical_overlap {
            "lexical_overlap"
        } else {
            "other"
        }
    }
}

/// Tags a pair on tokens exactly as given. `constituents` index into
/// `premise`.
pub fn tag_hans_heuristics<S: AsRef<str>>(
    premise: &[S],
    hypothesis: &[S],
    constituents: Option<&[Span]>,
) -> HeuristicTags {
    let prem: Vec<&str> = premise.iter().map(AsRef::as_ref).collect();
    let hyp: Vec<&str> = hypothesis.iter().map(AsRef::as_ref).collect();

    let lexical_overlap = {
        let set: std::collections::HashSet<&str> = prem.iter().copied().collect();
        hyp.iter().all(|h| set.contains(h))
    };
    let subsequence = hyp.is_empty() || prem.windows(hyp.len()).any(|w| w == hyp.as_slice());
    let constituent = constituents.map(|spans| {
        spans
            .iter()
            .any(|s| s.end <= prem.len() && prem[s.start..s.end] == hyp[..])
    });
    HeuristicTags {
        lexical_overlap,
        subsequence,
        constituent,
    }
}

/// Lowercases and drops punctuation tokens on both sides before tagging,
/// remapping constituent spans onto the surviving premise tokens.
pub fn tag_pair_normalized<S: AsRef<str>>(
    premise: &[S],
    hypothesis: &[S],
    constituents: Option<&[Span]>,
) -> HeuristicTags {
    // kept_before[i] = number of surviving premise tokens before index i
    let mut kept_before = Vec::with_capacity(premise.len() + 1);
    let mut prem = Vec::new();
    for tok in premise {
        kept_before.push(prem.len());
        if let Some(t) = normalize_token(tok.as_ref()) {
            prem.push(t);
        }
    }
    kept_before.push(prem.len());
    let hyp: Vec<String> = hypothesis
        .iter()
        .filter_map(|t| normalize_token(t.as_ref()))
        .collect();

    let remapped: Option<Vec<Span>> = constituents.map(|spans| {
        spans
            .iter()
            .filter(|s| s.end <= premise.len())
            .map(|s| Span::new(kept_before[s.start], kept_before[s.end]))
            .filter(|s| !s.is_empty())
            .collect()
    });
    tag_hans_heuristics(&prem, &hyp, remapped.as_deref())
}
