//! Command-line surface: argument structs, config-file merging, and the
//! shared error type that drives exit codes.
//!
//! Every option can also come from a `key=value` config file passed with
//! `--config`; explicit flags win on conflict. Randomized commands take
//! their seed from `--seed`, then the config file, then the `MFTK_SEED`
//! environment variable; there is no hidden entropy.

use std::fmt::Display;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use mftk::config::ConfigFile;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag combinations: exit code 1.
    Usage(String),
    /// Malformed or unusable input data: exit code 2.
    Data(String),
}

pub fn usage(message: impl Display) -> CliError {
    CliError::Usage(message.to_string())
}

pub fn data(message: impl Display) -> CliError {
    CliError::Data(message.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "mftk",
    version = concat!(env!("CARGO_PKG_VERSION"), " (formats v1)"),
    about = "Moral-foundations text scoring, training, evaluation, and analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every document on the five foundations.
    Score(ScoreArgs),
    /// Evaluate scores against labels: AUC, calibration, threshold table.
    Evaluate(EvaluateArgs),
    /// Split a labeled corpus for training and testing.
    Split(SplitArgs),
    /// Fit tf-idf features and train a linear classifier.
    Train(TrainArgs),
    /// Downstream statistics over scores, outcomes, and labels.
    Analyze(AnalyzeArgs),
    /// Vocabulary overlap statistics across three lexicon files.
    LexiconStats(LexiconStatsArgs),
}

#[derive(Debug, Args, Default)]
pub struct ScoreArgs {
    /// Scoring method: mfd | mfd2 | emfd | ddr
    #[arg(long)]
    pub method: Option<String>,
    /// Lexicon file (mfd/mfd2/emfd)
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Embedding table file (ddr)
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Seed-word file (ddr); defaults to the bundled seed sets
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    /// Input corpus (JSONL)
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Output score CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Source tag stamped on every row; defaults to the method name
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct EvaluateArgs {
    /// Score CSV produced by `score` (or externally)
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Labeled corpus (JSONL)
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Evaluate one foundation only (default: all five)
    #[arg(long)]
    pub foundation: Option<String>,
    /// Keep only score rows with this source tag
    #[arg(long)]
    pub source: Option<String>,
    /// Output report JSON (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional CSV of the per-foundation threshold tables
    #[arg(long)]
    pub thresholds_csv: Option<PathBuf>,
    /// Optional CSV of the per-foundation calibration bins
    #[arg(long)]
    pub calibration_csv: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct SplitArgs {
    /// stratified | iterative
    #[arg(long)]
    pub strategy: Option<String>,
    /// Foundation to stratify by (stratified strategy)
    #[arg(long)]
    pub foundation: Option<String>,
    /// Test fraction for the stratified strategy (default 0.1)
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Comma-separated subset fractions for the iterative strategy,
    /// e.g. 0.9,0.1
    #[arg(long)]
    pub fractions: Option<String>,
    /// Input corpus (JSONL, labeled)
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Output path prefix
    #[arg(long)]
    pub out_prefix: Option<PathBuf>,
    /// Shuffle seed (required; MFTK_SEED is the fallback)
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct TrainArgs {
    /// Labeled training corpus (JSONL)
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Foundation whose binary label is the training signal
    #[arg(long)]
    pub foundation: Option<String>,
    /// logistic | hinge (default logistic)
    #[arg(long)]
    pub loss: Option<String>,
    /// Inverse regularization strength; conflicts with --cv-grid
    #[arg(long)]
    pub c: Option<f64>,
    /// "default" (decades 1e-7..1e7) or a comma-separated list of C values
    #[arg(long)]
    pub cv_grid: Option<String>,
    /// Number of cross-validation folds (default 10)
    #[arg(long)]
    pub folds: Option<usize>,
    /// Stop-word file; defaults to the bundled 179-word list
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Output model JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for fold shuffling (required; MFTK_SEED is the fallback)
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct AnalyzeArgs {
    /// odds | chi2 | mwu | prevalence | length-bias | keyword-bias
    #[arg(long)]
    pub kind: Option<String>,
    /// Score CSV (odds, chi2, mwu)
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Outcome CSV `id,outcome` (odds, chi2, mwu; optional grouping for
    /// prevalence)
    #[arg(long)]
    pub outcomes: Option<PathBuf>,
    /// Corpus JSONL (prevalence, length-bias, keyword-bias)
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Keep only score rows with this source tag
    #[arg(long)]
    pub source: Option<String>,
    /// Binarization percentile for odds/chi2 (default 80)
    #[arg(long)]
    pub percentile: Option<f64>,
    /// Apply the Haldane–Anscombe +0.5 correction instead of failing on
    /// zero cells
    #[arg(long)]
    pub haldane: bool,
    /// Word-count method for length-bias / keyword-bias: mfd | mfd2 | emfd
    #[arg(long)]
    pub method: Option<String>,
    /// Lexicon file for --method
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// First keyword group (keyword-bias)
    #[arg(long)]
    pub keyword_a: Option<String>,
    /// Second keyword group (keyword-bias)
    #[arg(long)]
    pub keyword_b: Option<String>,
    /// Output report JSON (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional plot-ready CSV
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct LexiconStatsArgs {
    /// The three lexicon files to compare
    #[arg(value_name = "LEXICON", num_args = 0..=3)]
    pub paths: Vec<PathBuf>,
    /// Comma-separated kinds of the three files (default
    /// prefix,word,weighted)
    #[arg(long)]
    pub kinds: Option<String>,
    /// Output report JSON (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Load the config file named by `--config`, or an empty one.
pub fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile, CliError> {
    match path {
        Some(path) => ConfigFile::load(path).map_err(usage),
        None => Ok(ConfigFile::default()),
    }
}

/// Flag, then config key, then `MFTK_SEED`.
pub fn resolve_seed(flag: Option<u64>, config: &ConfigFile) -> Result<Option<u64>, CliError> {
    if let Some(seed) = flag {
        return Ok(Some(seed));
    }
    if let Some(value) = config.get("seed") {
        return value
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("config seed {value:?} is not an integer")));
    }
    match std::env::var("MFTK_SEED") {
        Ok(value) => value
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("MFTK_SEED {value:?} is not an integer"))),
        Err(_) => Ok(None),
    }
}

/// Resolve an optional string setting against the config file.
pub fn resolve_string(
    flag: &Option<String>,
    config: &ConfigFile,
    key: &str,
) -> Option<String> {
    flag.clone().or_else(|| config.get(key).map(str::to_string))
}

/// Resolve an optional path setting against the config file.
pub fn resolve_path(
    flag: &Option<PathBuf>,
    config: &ConfigFile,
    key: &str,
) -> Option<PathBuf> {
    flag.clone().or_else(|| config.get(key).map(PathBuf::from))
}

/// A required setting: flag or config, else a usage error naming the flag.
pub fn require_path(
    flag: &Option<PathBuf>,
    config: &ConfigFile,
    key: &str,
) -> Result<PathBuf, CliError> {
    resolve_path(flag, config, key).ok_or_else(|| usage(format!("--{key} is required")))
}

pub fn require_string(
    flag: &Option<String>,
    config: &ConfigFile,
    key: &str,
) -> Result<String, CliError> {
    resolve_string(flag, config, key).ok_or_else(|| usage(format!("--{key} is required")))
}
