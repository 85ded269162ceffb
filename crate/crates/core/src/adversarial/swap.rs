use serde::{Deserialize, Serialize};

use super::{replace_negative_ending, set_initial_case, GenError, GenOutcome, Provenance};
use crate::corpus::{byte_offset, AnnotatedSentence, DepArc, McExample, Span};

/// Dependency labels that mark the subject and object of a verb.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapRelations {
    pub subject: Vec<String>,
    pub object: Vec<String>,
}

impl Default for SwapRelations {
    fn default() -> Self {
        SwapRelations {
            subject: vec!["nsubj".into()],
            object: vec!["obj".into(), "dobj".into()],
        }
    }
}

impl SwapRelations {
    fn is_subject(&self, label: &str) -> bool {
        self.subject.iter().any(|l| l == label)
    }

    fn is_object(&self, label: &str) -> bool {
        self.object.iter().any(|l| l == label)
    }
}

fn children(heads: &[DepArc]) -> Vec<Vec<usize>> {
    let mut kids = vec![Vec::new(); heads.len()];
    for (i, arc) in heads.iter().enumerate() {
        if let Some(h) = arc.head {
            kids[h].push(i);
        }
    }
    kids
}

/// Token span of the subtree rooted at `root`, if it is contiguous.
fn subtree_span(root: usize, kids: &[Vec<usize>]) -> Option<Span> {
    let mut seen = vec![false; kids.len()];
    let mut stack = vec![root];
    let (mut lo, mut hi, mut count) = (root, root, 0usize);
    while let Some(n) = stack.pop() {
        if std::mem::replace(&mut seen[n], true) {
            // cycle in a malformed tree
            return None;
        }
        count += 1;
        lo = lo.min(n);
        hi = hi.max(n);
        stack.extend(kids[n].iter().copied());
    }
    (hi - lo + 1 == count).then(|| Span::new(lo, hi + 1))
}

/// Subject and object subtree spans of the first verb (by token order) with
/// exactly one subject and exactly one object dependent.
fn find_subject_object(
    sentence: &AnnotatedSentence,
    heads: &[DepArc],
    relations: &SwapRelations,
) -> Option<(Span, Span)> {
    let kids = children(heads);
    for deps in &kids {
        let subjects: Vec<usize> = deps
            .iter()
            .copied()
            .filter(|&d| relations.is_subject(&heads[d].label))
            .collect();
        let objects: Vec<usize> = deps
            .iter()
            .copied()
            .filter(|&d| relations.is_object(&heads[d].label))
            .collect();
        if subjects.len() != 1 || objects.len() != 1 {
            continue;
        }
        if let (Some(s), Some(o)) = (
            subtree_span(subjects[0], &kids),
            subtree_span(objects[0], &kids),
        ) {
            debug_assert!(s.end <= sentence.tokens.len() && o.end <= sentence.tokens.len());
            return Some((s, o));
        }
    }
    None
}

/// Premise text with its subject and object phrases exchanged. The casing
/// of the two phrase-initial characters is exchanged as well, so sentence
/// capitalization stays in place.
///
/// Returns `Ok(None)` when no verb has exactly one subject and one object.
pub fn swap_subject_object(
    sentence: &AnnotatedSentence,
    relations: &SwapRelations,
) -> Result<Option<String>, GenError> {
    let heads = sentence
        .dep_heads
        .as_deref()
        .ok_or_else(|| GenError::MissingDependencies {
            id: sentence.id.clone(),
        })?;
    let Some((subj, obj)) = find_subject_object(sentence, heads, relations) else {
        return Ok(None);
    };

    let subj_text = sentence.span_text(subj);
    let obj_text = sentence.span_text(obj);
    let subj_upper = subj_text.chars().next().is_some_and(char::is_uppercase);
    let obj_upper = obj_text.chars().next().is_some_and(char::is_uppercase);
    let into_subj_slot = set_initial_case(obj_text, subj_upper);
    let into_obj_slot = set_initial_case(subj_text, obj_upper);

    let (first, first_repl, second, second_repl) = if subj.start < obj.start {
        (subj, into_subj_slot, obj, into_obj_slot)
    } else {
        (obj, into_obj_slot, subj, into_subj_slot)
    };
    let text = &sentence.text;
    let at = |c: usize| byte_offset(text, c);
    let (f0, f1) = sentence.char_range(first);
    let (s0, s1) = sentence.char_range(second);

    let mut out = String::with_capacity(text.len());
    out.push_str(&text[..at(f0)]);
    out.push_str(&first_repl);
    out.push_str(&text[at(f1)..at(s0)]);
    out.push_str(&second_repl);
    out.push_str(&text[at(s1)..]);
    Ok(Some(out))
}

/// Replaces one incorrect ending with the subject/object-swapped premise.
pub fn gen_syntax_swap(
    ex: &McExample,
    premise: &AnnotatedSentence,
    relations: &SwapRelations,
    seed: u64,
) -> Result<Option<GenOutcome>, GenError> {
    Ok(swap_subject_object(premise, relations)?
        .and_then(|ending| replace_negative_ending(ex, ending, Provenance::SyntaxSwap, seed)))
}
