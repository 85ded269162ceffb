use super::{match_case, replace_negative_ending, AntonymLexicon, GenOutcome, Provenance};
use crate::corpus::{byte_offset, AnnotatedSentence, McExample, SrlFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Suffix {
    None,
    Ing,
    S,
}

/// Lemma guesses for a surface verb, most literal first.
fn lemma_candidates(word: &str) -> Vec<(String, Suffix)> {
    let w = word.to_lowercase();
    let mut out = vec![(w.clone(), Suffix::None)];
    if let Some(stem) = w.strip_suffix("ing").filter(|s| s.len() >= 2) {
        let b = stem.as_bytes();
        if b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] {
            // sitting -> sit
            out.push((stem[..stem.len() - 1].to_string(), Suffix::Ing));
        }
        out.push((stem.to_string(), Suffix::Ing));
        out.push((format!("{stem}e"), Suffix::Ing));
    }
    if let Some(stem) = w.strip_suffix("es").filter(|s| !s.is_empty()) {
        out.push((stem.to_string(), Suffix::S));
    }
    if let Some(stem) = w.strip_suffix('s').filter(|s| !s.is_empty()) {
        out.push((stem.to_string(), Suffix::S));
    }
    out
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn inflect(lemma: &str, suffix: Suffix) -> String {
    match suffix {
        Suffix::None => lemma.to_string(),
        Suffix::Ing => {
            let b = lemma.as_bytes();
            if lemma.ends_with('e') && !lemma.ends_with("ee") && lemma.len() > 2 {
                format!("{}ing", &lemma[..lemma.len() - 1])
            } else if b.len() == 3
                && !is_vowel(b[0])
                && is_vowel(b[1])
                && !is_vowel(b[2])
                && !matches!(b[2], b'w' | b'x' | b'y')
            {
                format!("{lemma}{}ing", b[2] as char)
            } else {
                format!("{lemma}ing")
            }
        }
        Suffix::S => {
            if ["s", "x", "z", "ch", "sh"].iter().any(|e| lemma.ends_with(e)) {
                format!("{lemma}es")
            } else {
                format!("{lemma}s")
            }
        }
    }
}

/// Head token of a predicate span: the token whose head lies outside the
/// span, else the first token.
fn predicate_head(sentence: &AnnotatedSentence, frame: &SrlFrame) -> usize {
    let span = frame.predicate;
    if let Some(heads) = &sentence.dep_heads {
        if let Some(i) = (span.start..span.end)
            .find(|&i| heads[i].head.is_none_or(|h| !span.contains(h)))
        {
            return i;
        }
    }
    span.start
}

/// Premise text with its first verb replaced by an antonym, or `None` when
/// there is no verb or no usable antonym.
pub fn substitute_antonym(sentence: &AnnotatedSentence, lexicon: &AntonymLexicon) -> Option<String> {
    let frame = sentence
        .frames
        .iter()
        .min_by_key(|f| (f.predicate.start, f.order))?;
    let tok = &sentence.tokens[predicate_head(sentence, frame)];

    let (antonym, suffix) = lemma_candidates(&tok.text).into_iter().find_map(|(lemma, suffix)| {
        lexicon
            .antonyms(&lemma)
            .iter()
            .find(|a| {
                !a.chars().any(|c| c.is_whitespace() || c == '_') && a.to_lowercase() != lemma
            })
            .map(|a| (a.to_lowercase(), suffix))
    })?;

    let replacement = match_case(&inflect(&antonym, suffix), &tok.text);
    if replacement == tok.text {
        return None;
    }
    let text = &sentence.text;
    Some(format!(
        "{}{}{}",
        &text[..byte_offset(text, tok.start)],
        replacement,
        &text[byte_offset(text, tok.end)..]
    ))
}

/// Replaces one incorrect ending with the antonym-substituted premise.
pub fn gen_antonym(
    ex: &McExample,
    premise: &AnnotatedSentence,
    lexicon: &AntonymLexicon,
    seed: u64,
) -> Option<GenOutcome> {
    substitute_antonym(premise, lexicon)
        .and_then(|ending| replace_negative_ending(ex, ending, Provenance::Antonym, seed))
}
