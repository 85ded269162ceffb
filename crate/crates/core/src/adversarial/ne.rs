use rand::seq::IndexedRandom;

use super::{example_rng, replace_negative_ending, GenError, GenOutcome, NePool, Provenance};
use crate::corpus::{byte_offset, AnnotatedSentence, McExample};

/// Premise text with its first named entity replaced by a different pool
/// entity of the same type. The draw comes from the example's own random
/// stream.
pub fn substitute_entity(
    sentence: &AnnotatedSentence,
    pool: &NePool,
    seed: u64,
    example_id: &str,
) -> Result<Option<String>, GenError> {
    let spans = sentence
        .ner_spans
        .as_deref()
        .ok_or_else(|| GenError::MissingEntities {
            id: sentence.id.clone(),
        })?;
    let Some(first) = spans.iter().min_by_key(|e| e.span) else {
        return Ok(None);
    };
    let original = sentence.span_text(first.span);
    let candidates: Vec<&String> = pool
        .of_type(&first.entity_type)
        .iter()
        .filter(|c| c.as_str() != original)
        .collect();

    let mut rng = example_rng(seed, "ne_pick", example_id);
    let Some(replacement) = candidates.choose(&mut rng) else {
        return Ok(None);
    };
    let (s, e) = sentence.char_range(first.span);
    let text = &sentence.text;
    Ok(Some(format!(
        "{}{}{}",
        &text[..byte_offset(text, s)],
        replacement,
        &text[byte_offset(text, e)..]
    )))
}

/// Replaces one incorrect ending with the entity-swapped premise.
pub fn gen_ne_swap(
    ex: &McExample,
    premise: &AnnotatedSentence,
    pool: &NePool,
    seed: u64,
) -> Result<Option<GenOutcome>, GenError> {
    Ok(substitute_entity(premise, pool, seed, &ex.id)?
        .and_then(|ending| replace_negative_ending(ex, ending, Provenance::NeSwap, seed)))
}
