//! `mftk evaluate`: AUC, the 20-bin calibration curve, and the six-row
//! percentile threshold table for each requested foundation. Calibration
//! needs scores in [0, 1]; for scorers outside that range (DDR cosines)
//! the calibration block is skipped with an explicit reason rather than
//! rescaling the scores.

use mftk_core::eval::{auc, calibration_curve, threshold_metrics_table, EvalError};
use mftk_core::foundation::Foundation;
use serde::Serialize;

use crate::cli::{data, load_config, require_path, resolve_path, resolve_string, CliError, EvaluateArgs};
use crate::commands::common::{emit_json, header_for, parse_foundation, write_text, HeaderDto};
use mftk::io::{format_f64, join_scores_labels, read_corpus, read_scores};

#[derive(Serialize)]
struct CalibrationBinDto {
    lo: f64,
    hi: f64,
    count: usize,
    mean_score: Option<f64>,
    positive_fraction: Option<f64>,
}

#[derive(Serialize)]
struct ThresholdRowDto {
    percentile: f64,
    threshold: f64,
    precision: f64,
    recall: f64,
    f1: f64,
    accuracy: f64,
    no_positive_predictions: bool,
}

#[derive(Serialize)]
struct FoundationEval {
    foundation: &'static str,
    n: usize,
    positives: usize,
    dropped_missing_label: usize,
    dropped_errored_score: usize,
    auc: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibration: Option<Vec<CalibrationBinDto>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibration_skipped: Option<String>,
    thresholds: Vec<ThresholdRowDto>,
}

#[derive(Serialize)]
struct EvalReport {
    header: HeaderDto,
    unlabeled_documents: usize,
    foundations: Vec<FoundationEval>,
}

pub fn run(args: EvaluateArgs) -> Result<(), CliError> {
    let config = load_config(&args.config)?;
    let scores_path = require_path(&args.scores, &config, "scores")?;
    let corpus_path = require_path(&args.corpus, &config, "corpus")?;
    let foundation_filter = resolve_string(&args.foundation, &config, "foundation");
    let source = resolve_string(&args.source, &config, "source");
    let out = resolve_path(&args.out, &config, "out");

    let foundations: Vec<Foundation> = match &foundation_filter {
        Some(name) => vec![parse_foundation(name)?],
        None => Foundation::ALL.to_vec(),
    };

    let scores = read_scores(&scores_path).map_err(data)?;
    let corpus = read_corpus(&corpus_path).map_err(data)?;
    let labeled = corpus.labeled_examples().map_err(data)?;
    let unlabeled_documents = corpus.records.len() - labeled.len();
    if labeled.is_empty() {
        return Err(data(format!(
            "{}: no labeled records to evaluate against",
            corpus_path.display()
        )));
    }

    let mut settings: Vec<(&str, String)> = vec![
        ("command", "evaluate".into()),
        ("scores", scores_path.display().to_string()),
        ("corpus", corpus_path.display().to_string()),
    ];
    if let Some(f) = &foundation_filter {
        settings.push(("foundation", f.clone()));
    }
    if let Some(s) = &source {
        settings.push(("source", s.clone()));
    }
    let header = header_for(&settings, None);

    let mut evals = Vec::new();
    for foundation in foundations {
        let joined =
            join_scores_labels(&scores, &labeled, foundation, source.as_deref()).map_err(data)?;
        let set = &joined.scored;
        let auc_value = auc(set).map_err(|e| match e {
            EvalError::SingleClass => data(format!(
                "foundation {foundation}: labels contain a single class; AUC undefined"
            )),
            other => data(format!("foundation {foundation}: {other}")),
        })?;
        let (calibration, calibration_skipped) = match calibration_curve(set) {
            Ok(report) => (
                Some(
                    report
                        .bins
                        .iter()
                        .map(|b| CalibrationBinDto {
                            lo: b.lo,
                            hi: b.hi,
                            count: b.count,
                            mean_score: b.mean_score,
                            positive_fraction: b.positive_fraction,
                        })
                        .collect(),
                ),
                None,
            ),
            Err(EvalError::ScoreOutOfRange) => (
                None,
                Some("scores outside [0, 1]; calibration curve not applicable".to_string()),
            ),
            Err(e) => return Err(data(format!("foundation {foundation}: {e}"))),
        };
        let table = threshold_metrics_table(set)
            .map_err(|e| data(format!("foundation {foundation}: {e}")))?;
        evals.push(FoundationEval {
            foundation: foundation.name(),
            n: set.len(),
            positives: set.positives(),
            dropped_missing_label: joined.dropped_missing_label,
            dropped_errored_score: joined.dropped_errored_score,
            auc: auc_value,
            calibration,
            calibration_skipped,
            thresholds: table
                .rows
                .iter()
                .map(|r| ThresholdRowDto {
                    percentile: r.percentile,
                    threshold: r.threshold,
                    precision: r.precision,
                    recall: r.recall,
                    f1: r.f1,
                    accuracy: r.accuracy,
                    no_positive_predictions: r.no_positive_predictions,
                })
                .collect(),
        });
    }

    if let Some(path) = resolve_path(&args.thresholds_csv, &config, "thresholds-csv") {
        let mut csv = String::from(
            "foundation,percentile,threshold,precision,recall,f1,accuracy\n",
        );
        for eval in &evals {
            for row in &eval.thresholds {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    eval.foundation,
                    row.percentile,
                    format_f64(row.threshold),
                    format_f64(row.precision),
                    format_f64(row.recall),
                    format_f64(row.f1),
                    format_f64(row.accuracy)
                ));
            }
        }
        write_text(&path, &format!("{}\n{csv}", header.comment_line()))?;
    }
    if let Some(path) = resolve_path(&args.calibration_csv, &config, "calibration-csv") {
        let mut csv = String::from("foundation,lo,hi,count,mean_score,positive_fraction\n");
        for eval in &evals {
            if let Some(bins) = &eval.calibration {
                for bin in bins {
                    csv.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        eval.foundation,
                        format_f64(bin.lo),
                        format_f64(bin.hi),
                        bin.count,
                        bin.mean_score.map(format_f64).unwrap_or_default(),
                        bin.positive_fraction.map(format_f64).unwrap_or_default()
                    ));
                }
            }
        }
        write_text(&path, &format!("{}\n{csv}", header.comment_line()))?;
    }

    let report = EvalReport {
        header: HeaderDto::from_header(&header),
        unlabeled_documents,
        foundations: evals,
    };
    emit_json(out.as_ref(), &report)
}
