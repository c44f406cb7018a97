//! Helpers shared by the subcommands: resource loading, scorer
//! construction, output headers, and report writing.

use std::path::{Path, PathBuf};

use mftk_core::ddr::{parse_embeddings, parse_seed_sets, EmbeddingTable, SeedSet};
use mftk_core::foundation::{Foundation, FoundationScores};
use mftk_core::lexicon::{
    parse_prefix_lexicon, parse_weighted_lexicon, parse_word_lexicon, PrefixLexicon,
    WeightedLexicon, WordLexicon,
};
use mftk_core::text::TokenizedDoc;
use serde::Serialize;

use crate::cli::{data, usage, CliError};
use mftk::io::FileHeader;
use mftk::{fnv1a_64, FORMAT_VERSION, TOOLKIT_VERSION};

/// Scoring methods exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mfd,
    Mfd2,
    Emfd,
    Ddr,
}

impl Method {
    pub fn parse(name: &str) -> Result<Method, CliError> {
        match name {
            "mfd" => Ok(Method::Mfd),
            "mfd2" => Ok(Method::Mfd2),
            "emfd" => Ok(Method::Emfd),
            "ddr" => Ok(Method::Ddr),
            other => Err(usage(format!(
                "unknown method {other:?} (expected mfd, mfd2, emfd, or ddr)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Mfd => "mfd",
            Method::Mfd2 => "mfd2",
            Method::Emfd => "emfd",
            Method::Ddr => "ddr",
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| data(format!("cannot read {}: {e}", path.display())))
}

pub fn load_prefix(path: &Path) -> Result<PrefixLexicon, CliError> {
    parse_prefix_lexicon(&read_file(path)?)
        .map_err(|e| data(format!("{}: {e}", path.display())))
}

pub fn load_word(path: &Path) -> Result<WordLexicon, CliError> {
    parse_word_lexicon(&read_file(path)?).map_err(|e| data(format!("{}: {e}", path.display())))
}

pub fn load_weighted(path: &Path) -> Result<WeightedLexicon, CliError> {
    parse_weighted_lexicon(&read_file(path)?)
        .map_err(|e| data(format!("{}: {e}", path.display())))
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable, CliError> {
    parse_embeddings(&read_file(path)?).map_err(|e| data(format!("{}: {e}", path.display())))
}

pub fn load_seed_sets(path: Option<&Path>) -> Result<[SeedSet; 5], CliError> {
    match path {
        Some(path) => parse_seed_sets(&read_file(path)?)
            .map_err(|e| data(format!("{}: {e}", path.display()))),
        None => Ok(mftk_core::ddr::default_seed_sets()),
    }
}

/// A word-count scorer with its match predicate, for the scoring command
/// and the bias diagnostics.
pub enum WordCountScorer {
    Prefix(PrefixLexicon),
    Word(WordLexicon),
    Weighted(WeightedLexicon),
}

impl WordCountScorer {
    pub fn load(method: Method, lexicon: &Path) -> Result<WordCountScorer, CliError> {
        match method {
            Method::Mfd => Ok(WordCountScorer::Prefix(load_prefix(lexicon)?)),
            Method::Mfd2 => Ok(WordCountScorer::Word(load_word(lexicon)?)),
            Method::Emfd => Ok(WordCountScorer::Weighted(load_weighted(lexicon)?)),
            Method::Ddr => Err(usage("ddr is not a word-count method".to_string())),
        }
    }

    pub fn score(&self, tdoc: &TokenizedDoc) -> FoundationScores {
        match self {
            WordCountScorer::Prefix(lex) => mftk_core::lexicon::score_prefix_count(tdoc, lex),
            WordCountScorer::Word(lex) => mftk_core::lexicon::score_word_count(tdoc, lex),
            WordCountScorer::Weighted(lex) => mftk_core::lexicon::score_weighted(tdoc, lex),
        }
    }

    /// Number of tokens with at least one lexicon match.
    pub fn matched_tokens(&self, tdoc: &TokenizedDoc) -> usize {
        match self {
            WordCountScorer::Prefix(lex) => mftk_core::lexicon::matched_token_count(tdoc, |t, l| {
                !lex.match_word(t).is_empty() || !lex.match_word(l).is_empty()
            }),
            WordCountScorer::Word(lex) => mftk_core::lexicon::matched_token_count(tdoc, |t, l| {
                !lex.get(t).is_empty() || !lex.get(l).is_empty()
            }),
            WordCountScorer::Weighted(lex) => {
                mftk_core::lexicon::matched_token_count(tdoc, |t, l| {
                    lex.get(t).is_some() || lex.get(l).is_some()
                })
            }
        }
    }
}

pub fn parse_foundation(name: &str) -> Result<Foundation, CliError> {
    Foundation::parse(name)
        .ok_or_else(|| usage(format!("unknown foundation {name:?} (expected one of authority, care, fairness, loyalty, sanctity)")))
}

/// Build the output header: hash the resolved settings so identical runs
/// stamp identical headers.
pub fn header_for(settings: &[(&str, String)], seed: Option<u64>) -> FileHeader {
    let mut canonical = String::new();
    for (key, value) in settings {
        canonical.push_str(key);
        canonical.push('=');
        canonical.push_str(value);
        canonical.push('\n');
    }
    FileHeader::new(seed, fnv1a_64(canonical.as_bytes()))
}

/// Header object embedded in JSON reports (JSON has no comment lines).
#[derive(Debug, Serialize)]
pub struct HeaderDto {
    pub toolkit_version: &'static str,
    pub format_version: u32,
    pub seed: Option<u64>,
    pub config_hash: String,
}

impl HeaderDto {
    pub fn from_header(header: &FileHeader) -> HeaderDto {
        HeaderDto {
            toolkit_version: TOOLKIT_VERSION,
            format_version: FORMAT_VERSION,
            seed: header.seed,
            config_hash: format!("{:016x}", header.config_hash),
        }
    }
}

/// Pretty JSON with a trailing newline, to `--out` or stdout.
pub fn emit_json<T: Serialize>(out: Option<&PathBuf>, report: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| data(format!("report serialization failed: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| data(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| data(format!("cannot write {}: {e}", path.display())))
}
