//! `mftk split`: stratified single-foundation splits and iterative
//! multi-label stratification. The seed is mandatory; identical
//! invocations write identical partitions.

use mftk_core::dataset::{iterative_stratified_split, stratified_split, LabeledExample};

use crate::cli::{
    data, load_config, require_path, require_string, resolve_seed, usage, CliError, SplitArgs,
};
use crate::commands::common::{header_for, parse_foundation};
use mftk::io::{read_corpus, write_corpus, CorpusRecord, FileHeader};

fn parse_fractions(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad fraction {f:?}")))
        })
        .collect()
}

fn write_part(
    prefix: &std::path::Path,
    suffix: &str,
    examples: &[LabeledExample],
    header: &FileHeader,
) -> Result<std::path::PathBuf, CliError> {
    let path = std::path::PathBuf::from(format!("{}.{suffix}.jsonl", prefix.display()));
    let records: Vec<CorpusRecord> = examples.iter().map(CorpusRecord::from_labeled).collect();
    write_corpus(&path, &records, header).map_err(data)?;
    Ok(path)
}

pub fn run(args: SplitArgs) -> Result<(), CliError> {
    let config = load_config(&args.config)?;
    let strategy = require_string(&args.strategy, &config, "strategy")?;
    let input = require_path(&args.input, &config, "in")?;
    let out_prefix = require_path(&args.out_prefix, &config, "out-prefix")?;
    let seed = resolve_seed(args.seed, &config)?
        .ok_or_else(|| usage("--seed is required for split (or set MFTK_SEED)"))?;

    let corpus = read_corpus(&input).map_err(data)?;
    let labeled = corpus.labeled_examples().map_err(data)?;
    if labeled.len() != corpus.records.len() {
        return Err(data(format!(
            "{}: {} records have no labels; split needs a fully labeled corpus",
            input.display(),
            corpus.records.len() - labeled.len()
        )));
    }

    match strategy.as_str() {
        "stratified" => {
            let foundation =
                parse_foundation(&require_string(&args.foundation, &config, "foundation")?)?;
            let test_fraction = match args.test_fraction {
                Some(f) => f,
                None => match config.get("test-fraction") {
                    Some(v) => v
                        .parse()
                        .map_err(|_| usage(format!("bad test-fraction {v:?}")))?,
                    None => 0.1,
                },
            };
            let settings: Vec<(&str, String)> = vec![
                ("command", "split".into()),
                ("strategy", "stratified".into()),
                ("foundation", foundation.name().into()),
                ("test-fraction", test_fraction.to_string()),
                ("in", input.display().to_string()),
                ("out-prefix", out_prefix.display().to_string()),
            ];
            let header = header_for(&settings, Some(seed));
            let split = stratified_split(&labeled, foundation, test_fraction, seed)
                .map_err(data)?;
            let train_path = write_part(&out_prefix, "train", &split.train, &header)?;
            let test_path = write_part(&out_prefix, "test", &split.test, &header)?;
            let mut message = format!(
                "stratified split on {foundation}: {} train -> {}, {} test -> {}",
                split.train.len(),
                train_path.display(),
                split.test.len(),
                test_path.display()
            );
            if !split.excluded.is_empty() {
                let excluded_path =
                    write_part(&out_prefix, "excluded", &split.excluded, &header)?;
                message.push_str(&format!(
                    ", {} excluded (missing label) -> {}",
                    split.excluded.len(),
                    excluded_path.display()
                ));
            }
            println!("{message}");
        }
        "iterative" => {
            let fractions_text = require_string(&args.fractions, &config, "fractions")?;
            let fractions = parse_fractions(&fractions_text)?;
            let settings: Vec<(&str, String)> = vec![
                ("command", "split".into()),
                ("strategy", "iterative".into()),
                ("fractions", fractions_text.clone()),
                ("in", input.display().to_string()),
                ("out-prefix", out_prefix.display().to_string()),
            ];
            let header = header_for(&settings, Some(seed));
            let parts = iterative_stratified_split(&labeled, &fractions, seed).map_err(data)?;
            let mut sizes = Vec::new();
            for (i, part) in parts.iter().enumerate() {
                let path = write_part(&out_prefix, &format!("part{i}"), part, &header)?;
                sizes.push(format!("{} -> {}", part.len(), path.display()));
            }
            println!("iterative split into {} parts: {}", parts.len(), sizes.join(", "));
        }
        other => {
            return Err(usage(format!(
                "unknown strategy {other:?} (expected stratified or iterative)"
            )))
        }
    }
    Ok(())
}
