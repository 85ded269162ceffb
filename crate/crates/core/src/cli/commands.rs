use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::Staging;
use super::{
    AugmentArgs, BiasScoreArgs, EvalArgs, Failure, GenArgs, Generator, ReportArgs, TagArgs, Task,
};
use crate::adversarial::{
    gen_antonym, gen_ne_swap, gen_stress_length, gen_stress_negation, gen_stress_overlap,
    gen_syntax_swap, tag_pair_normalized, AntonymLexicon, GenOutcome, NePool, SwapRelations,
};
use crate::augment::{augment_dataset, AugmentPolicy};
use crate::biasmodel::{bias_score as score_bias, BiasDataset, DiagnosticConfig, EmbeddingStore, FeatureConfig, Hyper};
use crate::corpus::{
    read_annotations, read_jsonl, sentence_key, tokenize, write_jsonl, AnnotationStore, FromJsonLine,
    McExample, NliExample, SentenceField, Span,
};
use crate::evalharness::{
    accuracy, aggregate_seeds, gold_from_mc, gold_from_nli, render_report, subset_breakdown, GoldSet,
    PredictionFile, ReportRow, RunReport,
};

type CmdResult = Result<(), Failure>;

fn load<T: FromJsonLine>(path: &Path) -> Result<Vec<T>> {
    read_jsonl::<T>(path)
        .and_then(|records| records.collect::<Result<Vec<T>, _>>())
        .with_context(|| format!("reading {}", path.display()))
}

fn load_annotations(path: &Path) -> Result<AnnotationStore> {
    read_annotations(path).with_context(|| format!("reading annotations {}", path.display()))
}

fn jsonl<T: Serialize>(records: &[T]) -> impl FnOnce(&mut dyn std::io::Write) -> std::io::Result<()> + '_ {
    move |w| write_jsonl(w, records)
}

pub fn augment(out_dir: &Path, args: &AugmentArgs) -> CmdResult {
    let policy = AugmentPolicy {
        max_frames: args.max_frames,
        targets: args.targets.into(),
        segment_separator: args.separator.clone(),
        on_missing: args.on_missing.into(),
    };
    let store = load_annotations(&args.annotations)?;
    let mut staging = Staging::new(out_dir)?;
    staging.input(&args.input)?;
    staging.input(&args.annotations)?;

    let summary = match args.task {
        Task::Nli => {
            let data: Vec<NliExample> = load(&args.input)?;
            let (out, summary) = augment_dataset(&data, &store, &policy).map_err(anyhow::Error::from)?;
            staging.write(&args.output, jsonl(&out))?;
            summary
        }
        Task::Mc => {
            let data: Vec<McExample> = load(&args.input)?;
            let (out, summary) = augment_dataset(&data, &store, &policy).map_err(anyhow::Error::from)?;
            staging.write(&args.output, jsonl(&out))?;
            summary
        }
    };
    staging.write_json("augment_summary.json", &summary)?;
    staging.count("examples", summary.examples);
    staging.count("augmented", summary.augmented);
    staging.count("skipped_missing_annotation", summary.skipped_missing_annotation);
    #[derive(Serialize)]
    struct Config<'a> {
        args: &'a AugmentArgs,
        policy: &'a AugmentPolicy,
    }
    staging.commit("augment", &Config { args, policy: &policy })?;
    log::info!(
        "augmented {} of {} examples",
        summary.augmented,
        summary.examples
    );
    Ok(())
}

enum GenStatus {
    Generated(GenOutcome),
    Ineligible,
    Missing(String),
}

fn required<'a, T>(value: &'a Option<T>, flag: &str, generator: &str) -> Result<&'a T, Failure> {
    value
        .as_ref()
        .ok_or_else(|| Failure::Usage(format!("--{flag} is required by generator {generator}")))
}

pub fn gen(out_dir: &Path, args: &GenArgs) -> CmdResult {
    let name = crate::adversarial::Provenance::from(args.generator).as_str();
    let output = args.output.clone().unwrap_or_else(|| format!("{name}.jsonl"));
    let mut staging = Staging::new(out_dir)?;
    staging.input(&args.input)?;

    let stress = match args.generator {
        Generator::Negation => Some(gen_stress_negation as fn(&NliExample) -> GenOutcome),
        Generator::WordOverlap => Some(gen_stress_overlap as fn(&NliExample) -> GenOutcome),
        Generator::LengthMismatch => Some(gen_stress_length as fn(&NliExample) -> GenOutcome),
        _ => None,
    };
    let statuses: Vec<GenStatus> = if let Some(generate) = stress {
        let data: Vec<NliExample> = load(&args.input)?;
        data.par_iter()
            .map(|ex| GenStatus::Generated(generate(ex)))
            .collect()
    } else {
        let ann_path = required(&args.annotations, "annotations", name)?;
        let lexicon = match args.generator {
            Generator::Antonym => {
                let path = required(&args.lexicon, "lexicon", name)?;
                staging.input(path)?;
                Some(AntonymLexicon::load(path).map_err(anyhow::Error::from)?)
            }
            _ => None,
        };
        let pool = match args.generator {
            Generator::NeSwap => {
                let path = required(&args.ne_pool, "ne-pool", name)?;
                staging.input(path)?;
                Some(NePool::load(path).map_err(anyhow::Error::from)?)
            }
            _ => None,
        };
        let relations = SwapRelations {
            subject: args.subject_labels.clone(),
            object: args.object_labels.clone(),
        };
        let store = load_annotations(ann_path)?;
        staging.input(ann_path)?;
        let data: Vec<McExample> = load(&args.input)?;
        data.par_iter()
            .map(|ex| {
                let key = sentence_key(&ex.id, SentenceField::Premise);
                let Some(premise) = store.resolve(&key, &ex.premise) else {
                    return GenStatus::Missing(format!("no annotation for {key:?}"));
                };
                let outcome = match args.generator {
                    Generator::SyntaxSwap => gen_syntax_swap(ex, premise, &relations, args.seed),
                    Generator::Antonym => Ok(gen_antonym(ex, premise, lexicon.as_ref().expect("loaded"), args.seed)),
                    Generator::NeSwap => gen_ne_swap(ex, premise, pool.as_ref().expect("loaded"), args.seed),
                    _ => unreachable!("stress generators handled above"),
                };
                match outcome {
                    Ok(Some(o)) => GenStatus::Generated(o),
                    Ok(None) => GenStatus::Ineligible,
                    Err(e) => GenStatus::Missing(e.to_string()),
                }
            })
            .collect()
    };

    let mut generated = Vec::new();
    let (mut ineligible, mut missing) = (0, 0);
    for status in &statuses {
        match status {
            GenStatus::Generated(o) => generated.push(o.clone()),
            GenStatus::Ineligible => ineligible += 1,
            GenStatus::Missing(reason) => {
                log::warn!("{reason}; example skipped");
                missing += 1;
            }
        }
    }
    staging.write(&output, jsonl(&generated))?;
    staging.count("examples", statuses.len());
    staging.count("generated", generated.len());
    staging.count("ineligible", ineligible);
    staging.count("missing_annotation", missing);
    staging.commit("gen", args)?;
    log::info!("{name}: generated {} of {}", generated.len(), statuses.len());
    Ok(())
}

fn sentence_tokens(
    store: Option<&AnnotationStore>,
    id: &str,
    field: SentenceField,
    text: &str,
) -> (Vec<String>, Option<Vec<Span>>) {
    match store.and_then(|s| s.resolve(&sentence_key(id, field), text)) {
        Some(s) => (
            s.tokens.iter().map(|t| t.text.clone()).collect(),
            s.constituents.clone(),
        ),
        None => (tokenize(text).into_iter().map(|t| t.text).collect(), None),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagRecord {
    pub id: String,
    pub lexical_overlap: bool,
    pub subsequence: bool,
    pub constituent: Option<bool>,
    pub subset: String,
}

pub fn tag(out_dir: &Path, args: &TagArgs) -> CmdResult {
    let mut staging = Staging::new(out_dir)?;
    staging.input(&args.input)?;
    let store = match &args.annotations {
        Some(p) => {
            staging.input(p)?;
            Some(load_annotations(p)?)
        }
        None => None,
    };
    let data: Vec<NliExample> = load(&args.input)?;
    let records: Vec<TagRecord> = data
        .par_iter()
        .map(|ex| {
            let (prem, constituents) =
                sentence_tokens(store.as_ref(), &ex.id, SentenceField::Premise, &ex.premise);
            let (hyp, _) = sentence_tokens(store.as_ref(), &ex.id, SentenceField::Hypothesis, &ex.hypothesis);
            let tags = tag_pair_normalized(&prem, &hyp, constituents.as_deref());
            TagRecord {
                id: ex.id.clone(),
                lexical_overlap: tags.lexical_overlap,
                subsequence: tags.subsequence,
                constituent: tags.constituent,
                subset: tags.subset_name().to_string(),
            }
        })
        .collect();
    let mut per_subset: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &records {
        *per_subset.entry(r.subset.as_str()).or_default() += 1;
    }
    staging.write(&args.output, jsonl(&records))?;
    staging.count("examples", records.len());
    for (subset, n) in per_subset {
        staging.count(&format!("subset_{subset}"), n);
    }
    staging.commit("tag", args)?;
    Ok(())
}

pub fn bias_score(out_dir: &Path, args: &BiasScoreArgs) -> CmdResult {
    let mut staging = Staging::new(out_dir)?;
    staging.input(&args.input)?;
    let annotations = match &args.annotations {
        Some(p) => {
            staging.input(p)?;
            Some(load_annotations(p)?)
        }
        None => None,
    };
    let store = match &args.embeddings {
        Some(p) => {
            staging.input(p)?;
            EmbeddingStore::load(p).with_context(|| format!("reading embeddings {}", p.display()))?
        }
        None => EmbeddingStore::new(1).map_err(anyhow::Error::from)?,
    };
    let dataset = match args.task {
        Task::Nli => BiasDataset::Nli(load(&args.input)?),
        Task::Mc => BiasDataset::Mc(load(&args.input)?),
    };
    let cfg = DiagnosticConfig {
        hyper: Hyper {
            hidden: args.hidden,
            learning_rate: args.learning_rate,
            epochs: args.epochs,
            l2: args.l2,
            seed: args.seed,
        },
        features: FeatureConfig {
            distance: args.distance.into(),
            fraction: args.fraction.into(),
        },
        split_ratio: args.split_ratio,
        seed: args.seed,
        margin: args.margin,
    };
    let report = score_bias(&dataset, annotations.as_ref(), &store, &cfg).map_err(anyhow::Error::from)?;
    if report.empty_hypotheses > 0 {
        log::warn!("{} pairs had an empty hypothesis after normalization", report.empty_hypotheses);
    }
    staging.write_json(&args.output, &report)?;
    staging.count("examples", dataset.len());
    staging.count("n_train", report.n_train);
    staging.count("n_eval", report.n_eval);
    staging.count("empty_hypotheses", report.empty_hypotheses);
    #[derive(Serialize)]
    struct Config<'a> {
        args: &'a BiasScoreArgs,
        diagnostic: &'a DiagnosticConfig,
    }
    staging.commit("bias-score", &Config { args, diagnostic: &cfg })?;
    println!(
        "accuracy {:.4} chance {:.4} flagged {}",
        report.accuracy, report.chance, report.flagged
    );
    Ok(())
}

#[derive(Deserialize)]
struct TagLine {
    id: String,
    subset: String,
}

fn load_tags(path: &Path) -> Result<HashMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut tags = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let t: TagLine = serde_json::from_str(line)
            .with_context(|| format!("{}: line {}", path.display(), i + 1))?;
        tags.insert(t.id, t.subset);
    }
    Ok(tags)
}

pub const ALL_SUBSET: &str = "all";

pub fn eval(out_dir: &Path, args: &EvalArgs) -> CmdResult {
    let mut staging = Staging::new(out_dir)?;
    staging.input(&args.gold)?;
    let gold: GoldSet = match args.task {
        Task::Nli => gold_from_nli(&load::<NliExample>(&args.gold)?),
        Task::Mc => gold_from_mc(&load::<McExample>(&args.gold)?),
    };
    let tags = match &args.tags {
        Some(p) => {
            staging.input(p)?;
            Some(load_tags(p)?)
        }
        None => None,
    };
    let dataset = args.dataset.clone().unwrap_or_else(|| {
        args.gold
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    });

    let mut per_subset: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (seed, path) in args.pred.iter().enumerate() {
        staging.input(path)?;
        let pred = PredictionFile::load(path, &args.model, seed as u64)
            .with_context(|| format!("reading predictions {}", path.display()))?;
        let acc = accuracy(&pred, &gold).with_context(|| format!("scoring {}", path.display()))?;
        per_subset.entry(ALL_SUBSET.into()).or_default().push(acc);
        if let Some(tags) = &tags {
            for (subset, score) in subset_breakdown(&pred, &gold, tags).map_err(anyhow::Error::from)? {
                per_subset.entry(subset).or_default().push(score.accuracy);
            }
        }
    }
    let rows = per_subset
        .into_iter()
        .map(|(subset, accs)| {
            let (mean, std) = aggregate_seeds(&accs)?;
            Ok(ReportRow {
                model: args.model.clone(),
                dataset: dataset.clone(),
                subset,
                mean,
                std,
                n_seeds: accs.len(),
            })
        })
        .collect::<Result<Vec<_>, crate::evalharness::EvalError>>()
        .map_err(anyhow::Error::from)?;
    let report = RunReport {
        rows,
        ..Default::default()
    }
    .sorted();

    write_report(&mut staging, &report, args.format)?;
    staging.count("gold_examples", gold.len());
    staging.count("seeds", args.pred.len());
    staging.count("rows", report.rows.len());
    staging.commit("eval", args)?;
    Ok(())
}

fn write_report(staging: &mut Staging, report: &RunReport, format: super::FormatArg) -> Result<()> {
    staging.write_text("report.json", &render_report(report, crate::evalharness::ReportFormat::Json))?;
    let rendered = render_report(report, format.into());
    if format != super::FormatArg::Json {
        staging.write_text(&format!("report.{}", format.extension()), &rendered)?;
    }
    print!("{rendered}");
    Ok(())
}

pub fn report(out_dir: &Path, args: &ReportArgs) -> CmdResult {
    let mut staging = Staging::new(out_dir)?;
    let mut merged = RunReport::default();
    for path in &args.input {
        staging.input(path)?;
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let r: RunReport =
            serde_json::from_str(&text).with_context(|| format!("parsing report {}", path.display()))?;
        merged.rows.extend(r.rows);
    }
    let merged = merged.sorted();
    write_report(&mut staging, &merged, args.format)?;
    staging.count("rows", merged.rows.len());
    staging.commit("report", args)?;
    Ok(())
}
