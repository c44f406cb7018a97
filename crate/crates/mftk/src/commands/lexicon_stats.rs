//! `mftk lexicon-stats`: vocabulary sizes, pairwise and triple
//! intersections, and unique-word fractions across three lexicon files.
//! Prefix entries are compared as literal strings.

use std::collections::BTreeSet;
use std::path::Path;

use mftk_core::lexicon::lexicon_stats;
use serde::Serialize;

use crate::cli::{load_config, usage, CliError, LexiconStatsArgs};
use crate::commands::common::{
    emit_json, header_for, load_prefix, load_weighted, load_word, HeaderDto,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LexiconKind {
    Prefix,
    Word,
    Weighted,
}

impl LexiconKind {
    fn parse(name: &str) -> Result<LexiconKind, CliError> {
        match name.trim() {
            "prefix" => Ok(LexiconKind::Prefix),
            "word" => Ok(LexiconKind::Word),
            "weighted" => Ok(LexiconKind::Weighted),
            other => Err(usage(format!(
                "unknown lexicon kind {other:?} (expected prefix, word, or weighted)"
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            LexiconKind::Prefix => "prefix",
            LexiconKind::Word => "word",
            LexiconKind::Weighted => "weighted",
        }
    }
}

fn load_vocabulary(path: &Path, kind: LexiconKind) -> Result<BTreeSet<String>, CliError> {
    Ok(match kind {
        LexiconKind::Prefix => load_prefix(path)?.vocabulary(),
        LexiconKind::Word => load_word(path)?.vocabulary(),
        LexiconKind::Weighted => load_weighted(path)?.vocabulary(),
    })
}

#[derive(Serialize)]
struct LexiconSummary {
    path: String,
    kind: &'static str,
    size: usize,
    unique_fraction: f64,
}

#[derive(Serialize)]
struct OverlapDto {
    header: HeaderDto,
    lexicons: Vec<LexiconSummary>,
    intersection_ab: usize,
    intersection_ac: usize,
    intersection_bc: usize,
    intersection_abc: usize,
    ab_fraction_of_a: f64,
    ab_fraction_of_b: f64,
}

pub fn run(args: LexiconStatsArgs) -> Result<(), CliError> {
    let config = load_config(&args.config)?;
    let paths: Vec<std::path::PathBuf> = if args.paths.is_empty() {
        ["a", "b", "c"]
            .iter()
            .map(|key| {
                config
                    .get(key)
                    .map(std::path::PathBuf::from)
                    .ok_or_else(|| usage(format!("lexicon path {key:?} missing (positional or config)")))
            })
            .collect::<Result<_, _>>()?
    } else {
        args.paths.clone()
    };
    if paths.len() != 3 {
        return Err(usage(format!(
            "lexicon-stats takes exactly three lexicon files, got {}",
            paths.len()
        )));
    }
    let kinds_text = args
        .kinds
        .clone()
        .or_else(|| config.get("kinds").map(str::to_string))
        .unwrap_or_else(|| "prefix,word,weighted".to_string());
    let kinds: Vec<LexiconKind> = kinds_text
        .split(',')
        .map(LexiconKind::parse)
        .collect::<Result<_, _>>()?;
    if kinds.len() != 3 {
        return Err(usage("--kinds needs exactly three entries".to_string()));
    }

    let vocab_a = load_vocabulary(&paths[0], kinds[0])?;
    let vocab_b = load_vocabulary(&paths[1], kinds[1])?;
    let vocab_c = load_vocabulary(&paths[2], kinds[2])?;
    let report = lexicon_stats(&vocab_a, &vocab_b, &vocab_c);

    let settings: Vec<(&str, String)> = vec![
        ("command", "lexicon-stats".into()),
        ("a", paths[0].display().to_string()),
        ("b", paths[1].display().to_string()),
        ("c", paths[2].display().to_string()),
        ("kinds", kinds_text.clone()),
    ];
    let header = header_for(&settings, None);

    let dto = OverlapDto {
        header: HeaderDto::from_header(&header),
        lexicons: vec![
            LexiconSummary {
                path: paths[0].display().to_string(),
                kind: kinds[0].name(),
                size: report.size_a,
                unique_fraction: report.unique_frac_a,
            },
            LexiconSummary {
                path: paths[1].display().to_string(),
                kind: kinds[1].name(),
                size: report.size_b,
                unique_fraction: report.unique_frac_b,
            },
            LexiconSummary {
                path: paths[2].display().to_string(),
                kind: kinds[2].name(),
                size: report.size_c,
                unique_fraction: report.unique_frac_c,
            },
        ],
        intersection_ab: report.ab,
        intersection_ac: report.ac,
        intersection_bc: report.bc,
        intersection_abc: report.abc,
        ab_fraction_of_a: report.ab_frac_of_a(),
        ab_fraction_of_b: report.ab_frac_of_b(),
    };
    emit_json(args.out.as_ref(), &dto)
}
