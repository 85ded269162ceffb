use super::{GenOutcome, Provenance};
use crate::corpus::NliExample;

pub const NEGATION_TAUTOLOGY: &str = "and false is not true";
pub const OVERLAP_TAUTOLOGY: &str = "and true is true";
const LENGTH_REPEATS: usize = 5;

/// `base` + single space + `tautology`; an empty base yields the tautology
/// alone.
pub fn append_tautology(base: &str, tautology: &str) -> String {
    if base.is_empty() {
        tautology.to_string()
    } else {
        format!("{base} {tautology}")
    }
}

fn relabel(ex: &NliExample, provenance: Provenance) -> NliExample {
    let mut out = ex.clone();
    out.id = format!("{}{}", ex.id, provenance.id_suffix());
    out
}

pub fn gen_stress_negation(ex: &NliExample) -> GenOutcome {
    let mut out = relabel(ex, Provenance::Negation);
    out.hypothesis = append_tautology(&ex.hypothesis, NEGATION_TAUTOLOGY);
    GenOutcome::stress(out, Provenance::Negation, &ex.id)
}

pub fn gen_stress_overlap(ex: &NliExample) -> GenOutcome {
    let mut out = relabel(ex, Provenance::WordOverlap);
    out.hypothesis = append_tautology(&ex.hypothesis, OVERLAP_TAUTOLOGY);
    GenOutcome::stress(out, Provenance::WordOverlap, &ex.id)
}

pub fn gen_stress_length(ex: &NliExample) -> GenOutcome {
    let mut out = relabel(ex, Provenance::LengthMismatch);
    for _ in 0..LENGTH_REPEATS {
        out.premise = append_tautology(&out.premise, OVERLAP_TAUTOLOGY);
    }
    GenOutcome::stress(out, Provenance::LengthMismatch, &ex.id)
}
