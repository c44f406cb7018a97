//! `mftk train`: tokenize, filter, fit tf-idf on the input corpus, and
//! train an L2-regularized linear classifier for one foundation. With
//! `--cv-grid` the C value is chosen by mean validation AUC over
//! stratified folds (ties toward the smaller C); `--c` pins it directly.
//! Defaults follow the usual setup: logistic regression tunes C on the
//! decade grid, the hinge baseline uses C = 1.0.

use mftk_core::linear::{
    cross_validate_c, default_c_grid, train_linear, LossKind,
};
use mftk_core::text::{default_stopwords, filter_tokens, parse_stopwords, tokenize};
use mftk_core::tfidf::{fit_tfidf, transform_tfidf};

use crate::cli::{
    data, load_config, require_path, require_string, resolve_seed, resolve_string, usage,
    CliError, TrainArgs,
};
use crate::commands::common::{parse_foundation, read_file};
use mftk::model::{CvSummary, SavedModel};

fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    if text == "default" {
        return Ok(default_c_grid());
    }
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad C value {v:?} in --cv-grid")))
        })
        .collect()
}

pub fn run(args: TrainArgs) -> Result<(), CliError> {
    let config = load_config(&args.config)?;
    let input = require_path(&args.input, &config, "in")?;
    let out = require_path(&args.out, &config, "out")?;
    let foundation = parse_foundation(&require_string(&args.foundation, &config, "foundation")?)?;
    let loss_name = resolve_string(&args.loss, &config, "loss")
        .unwrap_or_else(|| "logistic".to_string());
    let loss = LossKind::parse(&loss_name)
        .ok_or_else(|| usage(format!("unknown loss {loss_name:?} (expected logistic or hinge)")))?;
    let seed = resolve_seed(args.seed, &config)?
        .ok_or_else(|| usage("--seed is required for train (or set MFTK_SEED)"))?;
    let folds = match args.folds {
        Some(f) => f,
        None => match config.get("folds") {
            Some(v) => v.parse().map_err(|_| usage(format!("bad folds {v:?}")))?,
            None => 10,
        },
    };

    let c_flag = match args.c {
        Some(c) => Some(c),
        None => match config.get("c") {
            Some(v) => Some(v.parse().map_err(|_| usage(format!("bad C {v:?}")))?),
            None => None,
        },
    };
    let grid_flag = resolve_string(&args.cv_grid, &config, "cv-grid");
    if c_flag.is_some() && grid_flag.is_some() {
        return Err(usage("--c and --cv-grid are mutually exclusive"));
    }

    let stopwords = match resolve_string(&args.stopwords.clone().map(|p| p.display().to_string()), &config, "stopwords") {
        Some(path) => parse_stopwords(&read_file(std::path::Path::new(&path))?),
        None => default_stopwords(),
    };

    let corpus = read_corpus_labeled(&input)?;
    let mut token_lists = Vec::new();
    let mut labels = Vec::new();
    let mut excluded_missing = 0usize;
    for example in &corpus {
        match example.labels.get(foundation) {
            Some(label) => {
                let tdoc = tokenize(&mftk_core::text::Document::new(
                    example.id.clone(),
                    example.text.clone(),
                ));
                token_lists.push(filter_tokens(&tdoc, &stopwords));
                labels.push(label);
            }
            None => excluded_missing += 1,
        }
    }
    if token_lists.is_empty() {
        return Err(data(format!(
            "{}: no usable examples for foundation {foundation}",
            input.display()
        )));
    }

    let tfidf = fit_tfidf(&token_lists).map_err(data)?;
    let features: Vec<_> = token_lists
        .iter()
        .map(|tokens| transform_tfidf(&tfidf, tokens))
        .collect();
    let dimension = tfidf.vocabulary_size();

    let (c, cv_summary) = match (c_flag, grid_flag) {
        (Some(c), None) => (c, None),
        (None, Some(grid_text)) => {
            let grid = parse_grid(&grid_text)?;
            let result =
                cross_validate_c(&features, &labels, dimension, loss, &grid, folds, seed)
                    .map_err(data)?;
            (result.chosen_c, Some(CvSummary::from_result(&result)))
        }
        (None, None) => match loss {
            // Tune logistic over the decade grid; the SVM baseline is
            // conventionally run at C = 1.0.
            LossKind::Logistic => {
                let result = cross_validate_c(
                    &features,
                    &labels,
                    dimension,
                    loss,
                    &default_c_grid(),
                    folds,
                    seed,
                )
                .map_err(data)?;
                (result.chosen_c, Some(CvSummary::from_result(&result)))
            }
            LossKind::Hinge => (1.0, None),
        },
        (Some(_), Some(_)) => unreachable!("checked above"),
    };
    if c <= 0.0 {
        return Err(usage(format!("C must be positive, got {c}")));
    }

    let classifier = train_linear(&features, &labels, dimension, loss, c).map_err(data)?;
    let saved = SavedModel::new(
        foundation.name(),
        &tfidf,
        &classifier,
        Some(seed),
        cv_summary,
    );
    saved.save(&out).map_err(data)?;

    let positives = labels.iter().filter(|&&l| l).count();
    println!(
        "trained {} ({}) on {} examples ({} positive, {} excluded for missing label), vocabulary {}, C={} -> {}",
        foundation,
        loss.name(),
        labels.len(),
        positives,
        excluded_missing,
        dimension,
        c,
        out.display()
    );
    Ok(())
}

fn read_corpus_labeled(
    path: &std::path::Path,
) -> Result<Vec<mftk_core::dataset::LabeledExample>, CliError> {
    let corpus = mftk::io::read_corpus(path).map_err(data)?;
    let labeled = corpus.labeled_examples().map_err(data)?;
    if labeled.len() != corpus.records.len() {
        return Err(data(format!(
            "{}: {} records have no labels; train needs labeled examples",
            path.display(),
            corpus.records.len() - labeled.len()
        )));
    }
    Ok(labeled)
}
