//! Command-line front end. Each subcommand reads its inputs completely,
//! stages every output in the output directory and writes a
//! `manifest.json` with the resolved configuration and file digests.

mod commands;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adversarial::Provenance;
use crate::augment::{OnMissing, Targets};
use crate::biasmodel::{DistanceMode, FractionMode};
use crate::evalharness::ReportFormat;

pub use self::output::{sha256_file, MANIFEST_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "robustkit", version, about = "Corpus augmentation, adversarial set generation and bias diagnostics")]
pub struct Cli {
    /// error, warn, info, debug or trace
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: log::LevelFilter,

    #[arg(long, global = true, env = "ROBUSTKIT_OUT_DIR", default_value = "out")]
    pub out_dir: PathBuf,

    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Append predicate-argument markup to NLI or multiple-choice examples.
    Augment(AugmentArgs),
    /// Build an adversarial or stress-test set.
    Gen(GenArgs),
    /// Tag NLI pairs with the lexical-overlap heuristics they satisfy.
    Tag(TagArgs),
    /// Check whether overlap features alone solve a dataset.
    BiasScore(BiasScoreArgs),
    /// Score prediction files for several seeds and aggregate.
    Eval(EvalArgs),
    /// Merge and render saved evaluation reports.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Nli,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetsArg {
    PremiseOnly,
    HypothesisOnly,
    Both,
}

impl From<TargetsArg> for Targets {
    fn from(t: TargetsArg) -> Self {
        match t {
            TargetsArg::PremiseOnly => Targets::PremiseOnly,
            TargetsArg::HypothesisOnly => Targets::HypothesisOnly,
            TargetsArg::Both => Targets::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OnMissingArg {
    Skip,
    Fail,
}

impl From<OnMissingArg> for OnMissing {
    fn from(m: OnMissingArg) -> Self {
        match m {
            OnMissingArg::Skip => OnMissing::Skip,
            OnMissingArg::Fail => OnMissing::Fail,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct AugmentArgs {
    #[arg(long, value_enum)]
    pub task: Task,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub max_frames: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub targets: TargetsArg,
    #[arg(long, default_value = " ")]
    pub separator: String,
    #[arg(long, value_enum, default_value = "skip")]
    pub on_missing: OnMissingArg,
    /// Output file name inside the output directory.
    #[arg(long, default_value = "augmented.jsonl")]
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Generator {
    SyntaxSwap,
    Antonym,
    NeSwap,
    Negation,
    WordOverlap,
    LengthMismatch,
}

impl From<Generator> for Provenance {
    fn from(g: Generator) -> Self {
        match g {
            Generator::SyntaxSwap => Provenance::SyntaxSwap,
            Generator::Antonym => Provenance::Antonym,
            Generator::NeSwap => Provenance::NeSwap,
            Generator::Negation => Provenance::Negation,
            Generator::WordOverlap => Provenance::WordOverlap,
            Generator::LengthMismatch => Provenance::LengthMismatch,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub generator: Generator,
    /// NLI JSONL for stress generators, MC JSONL otherwise.
    #[arg(long)]
    pub input: PathBuf,
    /// Premise annotations; required by syntax_swap, antonym and ne_swap.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Antonym lexicon TSV; required by antonym.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Named-entity pool TSV; required by ne_swap.
    #[arg(long)]
    pub ne_pool: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Subject dependency labels for syntax_swap.
    #[arg(long, value_delimiter = ',', default_value = "nsubj")]
    pub subject_labels: Vec<String>,
    /// Object dependency labels for syntax_swap.
    #[arg(long, value_delimiter = ',', default_value = "obj,dobj")]
    pub object_labels: Vec<String>,
    /// Output file name; defaults to `<generator>.jsonl`.
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct TagArgs {
    /// NLI JSONL.
    #[arg(long)]
    pub input: PathBuf,
    /// Annotations supplying tokens and premise constituents.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    #[arg(long, default_value = "tags.jsonl")]
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceArg {
    Nearest,
    AllPairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FractionArg {
    Types,
    Occurrences,
}

impl From<DistanceArg> for DistanceMode {
    fn from(d: DistanceArg) -> Self {
        match d {
            DistanceArg::Nearest => DistanceMode::NearestPremise,
            DistanceArg::AllPairs => DistanceMode::AllPairs,
        }
    }
}

impl From<FractionArg> for FractionMode {
    fn from(f: FractionArg) -> Self {
        match f {
            FractionArg::Types => FractionMode::Types,
            FractionArg::Occurrences => FractionMode::Occurrences,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct BiasScoreArgs {
    #[arg(long, value_enum)]
    pub task: Task,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Word vectors, one `token v1 v2 ...` per line. Without it both
    /// distance features are 0.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    pub hidden: usize,
    #[arg(long, default_value_t = 0.05)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.0)]
    pub l2: f64,
    #[arg(long, default_value_t = 0.8)]
    pub split_ratio: f64,
    #[arg(long, default_value_t = 0.10)]
    pub margin: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "nearest")]
    pub distance: DistanceArg,
    #[arg(long, value_enum, default_value = "types")]
    pub fraction: FractionArg,
    #[arg(long, default_value = "bias_report.json")]
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatArg {
    Markdown,
    Json,
    Tsv,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Markdown => ReportFormat::Markdown,
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Tsv => ReportFormat::Tsv,
        }
    }
}

impl FormatArg {
    fn extension(self) -> &'static str {
        match self {
            FormatArg::Markdown => "md",
            FormatArg::Json => "json",
            FormatArg::Tsv => "tsv",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub task: Task,
    /// Gold NLI or MC JSONL.
    #[arg(long)]
    pub gold: PathBuf,
    /// Prediction JSONL files, one per seed; seeds are numbered from 0 in
    /// the order given.
    #[arg(long, num_args = 1.., required = true)]
    pub pred: Vec<PathBuf>,
    #[arg(long)]
    pub model: String,
    /// Dataset name in the report; defaults to the gold file stem.
    #[arg(long)]
    pub dataset: Option<String>,
    /// JSONL of `{"id": ..., "subset": ...}`, e.g. the output of `tag`.
    #[arg(long)]
    pub tags: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: FormatArg,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Report JSON files written by `eval`.
    #[arg(long, num_args = 1.., required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: FormatArg,
}

/// Failure of a subcommand, split by exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

/// Parses `args`, runs the subcommand and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let _ = env_logger::Builder::new()
        .filter_level(cli.log_level)
        .format_timestamp(None)
        .try_init();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            log::debug!("thread pool already configured: {e}");
        }
    }

    let result = match &cli.command {
        Command::Augment(a) => commands::augment(&cli.out_dir, a),
        Command::Gen(a) => commands::gen(&cli.out_dir, a),
        Command::Tag(a) => commands::tag(&cli.out_dir, a),
        Command::BiasScore(a) => commands::bias_score(&cli.out_dir, a),
        Command::Eval(a) => commands::eval(&cli.out_dir, a),
        Command::Report(a) => commands::report(&cli.out_dir, a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            EXIT_DATA
        }
    }
}
