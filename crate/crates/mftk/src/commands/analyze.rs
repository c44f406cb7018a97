//! `mftk analyze`: the downstream statistics. Odds ratios and chi-square
//! tests pair binarized foundation scores with a binary outcome per
//! document; the Mann–Whitney test compares raw score distributions
//! between the two outcome groups; prevalence, length-bias, and
//! keyword-bias work directly on corpora.
//!
//! For odds/chi2 the binarization threshold is the `--percentile` cutoff
//! (default 80, i.e. the top 20% of scores count as containing the
//! foundation), computed per foundation over every scored document; the
//! contingency table is then built over the documents that carry an
//! outcome.

use std::collections::BTreeMap;
use std::path::Path;

use mftk_core::eval::threshold_at_percentile;
use mftk_core::foundation::{Foundation, FoundationScores};
use mftk_core::stats::{
    chi_square_yates, keyword_group_means, length_bias_report, mann_whitney_u, odds_ratio,
    odds_ratio_haldane, prevalence, Contingency2x2, GroupStats, StatsError,
};
use mftk_core::text::tokenize;
use serde::Serialize;

use crate::cli::{
    data, load_config, require_path, require_string, resolve_path, resolve_string, usage,
    AnalyzeArgs, CliError,
};
use crate::commands::common::{
    emit_json, header_for, write_text, HeaderDto, Method, WordCountScorer,
};
use mftk::io::{format_f64, read_corpus, read_outcomes, read_scores, FileHeader, ScoreFile};

pub fn run(args: AnalyzeArgs) -> Result<(), CliError> {
    let config = load_config(&args.config)?;
    let kind = require_string(&args.kind, &config, "kind")?;
    match kind.as_str() {
        "odds" => contingency(args, config, ContingencyKind::Odds),
        "chi2" => contingency(args, config, ContingencyKind::ChiSquare),
        "mwu" => mwu(args, config),
        "prevalence" => prevalence_cmd(args, config),
        "length-bias" => length_bias(args, config),
        "keyword-bias" => keyword_bias(args, config),
        other => Err(usage(format!(
            "unknown analysis kind {other:?} (expected odds, chi2, mwu, prevalence, length-bias, or keyword-bias)"
        ))),
    }
}

enum ContingencyKind {
    Odds,
    ChiSquare,
}

/// Per-foundation scores keyed by doc id, plus the full score pool used
/// for percentile thresholds.
struct ScoresByFoundation {
    by_doc: [BTreeMap<String, f64>; 5],
}

fn scores_by_foundation(
    scores: &ScoreFile,
    source: Option<&str>,
) -> Result<ScoresByFoundation, CliError> {
    let mut by_doc: [BTreeMap<String, f64>; 5] = Default::default();
    for record in &scores.records {
        if let Some(filter) = source {
            if record.source != filter {
                continue;
            }
        }
        let slot = &mut by_doc[record.foundation.index()];
        if slot.insert(record.doc_id.clone(), record.score).is_some() {
            return Err(data(format!(
                "document {:?} has multiple {} scores; pass --source to disambiguate",
                record.doc_id,
                record.foundation.name()
            )));
        }
    }
    Ok(ScoresByFoundation { by_doc })
}

#[derive(Serialize)]
struct ContingencyCells {
    n11: u64,
    n10: u64,
    n01: u64,
    n00: u64,
}

#[derive(Serialize)]
struct OddsRow {
    foundation: &'static str,
    threshold: f64,
    cells: ContingencyCells,
    odds_ratio: f64,
    log_or: f64,
    se_log_or: f64,
    ci_low: f64,
    ci_high: f64,
    significant: bool,
    haldane: bool,
}

#[derive(Serialize)]
struct OddsReport {
    header: HeaderDto,
    percentile: f64,
    rows: Vec<OddsRow>,
}

#[derive(Serialize)]
struct ChiSquareRow {
    foundation: &'static str,
    threshold: f64,
    cells: ContingencyCells,
    statistic: f64,
    p: f64,
}

#[derive(Serialize)]
struct ChiSquareReport {
    header: HeaderDto,
    percentile: f64,
    rows: Vec<ChiSquareRow>,
}

fn resolve_percentile(args: &AnalyzeArgs, config: &mftk::config::ConfigFile) -> Result<f64, CliError> {
    match args.percentile {
        Some(p) => Ok(p),
        None => match config.get("percentile") {
            Some(v) => v
                .parse()
                .map_err(|_| usage(format!("bad percentile {v:?}"))),
            None => Ok(80.0),
        },
    }
}

fn contingency(
    args: AnalyzeArgs,
    config: mftk::config::ConfigFile,
    kind: ContingencyKind,
) -> Result<(), CliError> {
    let scores_path = require_path(&args.scores, &config, "scores")?;
    let outcomes_path = require_path(&args.outcomes, &config, "outcomes")?;
    let source = resolve_string(&args.source, &config, "source");
    let percentile = resolve_percentile(&args, &config)?;
    let haldane = args.haldane || config.get("haldane") == Some("true");
    let out = resolve_path(&args.out, &config, "out");
    let out_csv = resolve_path(&args.out_csv, &config, "out-csv");

    let scores = read_scores(&scores_path).map_err(data)?;
    let outcomes = read_outcomes(&outcomes_path).map_err(data)?;
    let by_foundation = scores_by_foundation(&scores, source.as_deref())?;

    let kind_name = match kind {
        ContingencyKind::Odds => "odds",
        ContingencyKind::ChiSquare => "chi2",
    };
    let settings: Vec<(&str, String)> = vec![
        ("command", "analyze".into()),
        ("kind", kind_name.into()),
        ("scores", scores_path.display().to_string()),
        ("outcomes", outcomes_path.display().to_string()),
        ("percentile", percentile.to_string()),
        ("haldane", haldane.to_string()),
    ];
    let header = header_for(&settings, None);

    let mut tables: Vec<(Foundation, f64, Contingency2x2)> = Vec::new();
    for foundation in Foundation::ALL {
        let doc_scores = &by_foundation.by_doc[foundation.index()];
        if doc_scores.is_empty() {
            return Err(data(format!(
                "no scores for foundation {foundation} in {}",
                scores_path.display()
            )));
        }
        let pool: Vec<f64> = doc_scores.values().copied().collect();
        let threshold = threshold_at_percentile(&pool, percentile)
            .map_err(|e| data(format!("foundation {foundation}: {e}")))?;
        let mut cells = [0u64; 4];
        for (doc_id, &outcome) in &outcomes {
            let score = doc_scores.get(doc_id).ok_or_else(|| {
                data(format!(
                    "document {doc_id:?} has an outcome but no {foundation} score"
                ))
            })?;
            let exposed = *score > threshold;
            let cell = match (exposed, outcome) {
                (true, true) => 0,
                (true, false) => 1,
                (false, true) => 2,
                (false, false) => 3,
            };
            cells[cell] += 1;
        }
        tables.push((
            foundation,
            threshold,
            Contingency2x2::new(cells[0], cells[1], cells[2], cells[3]),
        ));
    }

    match kind {
        ContingencyKind::Odds => {
            let mut rows = Vec::new();
            for (foundation, threshold, table) in &tables {
                let result = match odds_ratio(table) {
                    Ok(result) => result,
                    Err(StatsError::ZeroCell) if haldane => odds_ratio_haldane(table),
                    Err(StatsError::ZeroCell) => {
                        return Err(data(format!(
                            "foundation {foundation}: contingency table has a zero cell (n11={}, n10={}, n01={}, n00={}); rerun with --haldane to apply the +0.5 correction",
                            table.n11, table.n10, table.n01, table.n00
                        )))
                    }
                    Err(e) => return Err(data(format!("foundation {foundation}: {e}"))),
                };
                rows.push(OddsRow {
                    foundation: foundation.name(),
                    threshold: *threshold,
                    cells: ContingencyCells {
                        n11: table.n11,
                        n10: table.n10,
                        n01: table.n01,
                        n00: table.n00,
                    },
                    odds_ratio: result.odds_ratio,
                    log_or: result.log_or,
                    se_log_or: result.se_log_or,
                    ci_low: result.ci_low,
                    ci_high: result.ci_high,
                    significant: result.significant,
                    haldane: result.haldane,
                });
            }
            if let Some(path) = out_csv {
                write_odds_csv(&path, &rows, &header)?;
            }
            emit_json(
                out.as_ref(),
                &OddsReport {
                    header: HeaderDto::from_header(&header),
                    percentile,
                    rows,
                },
            )
        }
        ContingencyKind::ChiSquare => {
            let mut rows = Vec::new();
            for (foundation, threshold, table) in &tables {
                let (statistic, p) = chi_square_yates(table)
                    .map_err(|e| data(format!("foundation {foundation}: {e}")))?;
                rows.push(ChiSquareRow {
                    foundation: foundation.name(),
                    threshold: *threshold,
                    cells: ContingencyCells {
                        n11: table.n11,
                        n10: table.n10,
                        n01: table.n01,
                        n00: table.n00,
                    },
                    statistic,
                    p,
                });
            }
            if let Some(path) = out_csv {
                let mut csv = String::from("foundation,statistic,p\n");
                for row in &rows {
                    csv.push_str(&format!(
                        "{},{},{}\n",
                        row.foundation,
                        format_f64(row.statistic),
                        format_f64(row.p)
                    ));
                }
                write_text(&path, &format!("{}\n{csv}", header.comment_line()))?;
            }
            emit_json(
                out.as_ref(),
                &ChiSquareReport {
                    header: HeaderDto::from_header(&header),
                    percentile,
                    rows,
                },
            )
        }
    }
}

/// Plot-ready forest-plot data: the CI columns are on the log scale,
/// consistent with the log_or column.
fn write_odds_csv(path: &Path, rows: &[OddsRow], header: &FileHeader) -> Result<(), CliError> {
    let mut csv = String::from("foundation,log_or,ci_low,ci_high,significant\n");
    for row in rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.foundation,
            format_f64(row.log_or),
            format_f64(row.ci_low.ln()),
            format_f64(row.ci_high.ln()),
            row.significant
        ));
    }
    write_text(path, &format!("{}\n{csv}", header.comment_line()))
}

#[derive(Serialize)]
struct MwuRow {
    foundation: &'static str,
    n_positive_outcome: usize,
    n_negative_outcome: usize,
    u: f64,
    z: f64,
    p_two_sided: f64,
    degenerate: bool,
    mean_score_positive_outcome: f64,
    mean_score_negative_outcome: f64,
}

#[derive(Serialize)]
struct MwuReport {
    header: HeaderDto,
    rows: Vec<MwuRow>,
}

fn mwu(args: AnalyzeArgs, config: mftk::config::ConfigFile) -> Result<(), CliError> {
    let scores_path = require_path(&args.scores, &config, "scores")?;
    let outcomes_path = require_path(&args.outcomes, &config, "outcomes")?;
    let source = resolve_string(&args.source, &config, "source");
    let out = resolve_path(&args.out, &config, "out");
    let out_csv = resolve_path(&args.out_csv, &config, "out-csv");

    let scores = read_scores(&scores_path).map_err(data)?;
    let outcomes = read_outcomes(&outcomes_path).map_err(data)?;
    let by_foundation = scores_by_foundation(&scores, source.as_deref())?;

    let settings: Vec<(&str, String)> = vec![
        ("command", "analyze".into()),
        ("kind", "mwu".into()),
        ("scores", scores_path.display().to_string()),
        ("outcomes", outcomes_path.display().to_string()),
    ];
    let header = header_for(&settings, None);

    let mut rows = Vec::new();
    for foundation in Foundation::ALL {
        let doc_scores = &by_foundation.by_doc[foundation.index()];
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (doc_id, &outcome) in &outcomes {
            let score = doc_scores.get(doc_id).ok_or_else(|| {
                data(format!(
                    "document {doc_id:?} has an outcome but no {foundation} score"
                ))
            })?;
            if outcome {
                x.push(*score);
            } else {
                y.push(*score);
            }
        }
        let result = mann_whitney_u(&x, &y)
            .map_err(|e| data(format!("foundation {foundation}: {e}")))?;
        rows.push(MwuRow {
            foundation: foundation.name(),
            n_positive_outcome: x.len(),
            n_negative_outcome: y.len(),
            u: result.u,
            z: result.z,
            p_two_sided: result.p_two_sided,
            degenerate: result.degenerate,
            mean_score_positive_outcome: x.iter().sum::<f64>() / x.len() as f64,
            mean_score_negative_outcome: y.iter().sum::<f64>() / y.len() as f64,
        });
    }
    if let Some(path) = out_csv {
        let mut csv = String::from("foundation,u,z,p_two_sided,n_positive,n_negative\n");
        for row in &rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.foundation,
                format_f64(row.u),
                format_f64(row.z),
                format_f64(row.p_two_sided),
                row.n_positive_outcome,
                row.n_negative_outcome
            ));
        }
        write_text(&path, &format!("{}\n{csv}", header.comment_line()))?;
    }
    emit_json(
        out.as_ref(),
        &MwuReport {
            header: HeaderDto::from_header(&header),
            rows,
        },
    )
}

#[derive(Serialize)]
struct PrevalenceRow {
    group: String,
    n: usize,
    authority: f64,
    care: f64,
    fairness: f64,
    loyalty: f64,
    sanctity: f64,
}

#[derive(Serialize)]
struct PrevalenceReportDto {
    header: HeaderDto,
    excluded_missing_labels: usize,
    groups: Vec<PrevalenceRow>,
}

fn prevalence_row(group: &str, labels: &[[bool; 5]]) -> Result<PrevalenceRow, CliError> {
    let report = prevalence(labels, group).map_err(data)?;
    let f = &report.fractions;
    Ok(PrevalenceRow {
        group: report.group,
        n: report.count,
        authority: f.get(Foundation::Authority),
        care: f.get(Foundation::Care),
        fairness: f.get(Foundation::Fairness),
        loyalty: f.get(Foundation::Loyalty),
        sanctity: f.get(Foundation::Sanctity),
    })
}

fn prevalence_cmd(args: AnalyzeArgs, config: mftk::config::ConfigFile) -> Result<(), CliError> {
    let corpus_path = require_path(&args.corpus, &config, "corpus")?;
    let outcomes_path = resolve_path(&args.outcomes, &config, "outcomes");
    let out = resolve_path(&args.out, &config, "out");
    let out_csv = resolve_path(&args.out_csv, &config, "out-csv");

    let corpus = read_corpus(&corpus_path).map_err(data)?;
    let labeled = corpus.labeled_examples().map_err(data)?;

    let mut rows_all: Vec<[bool; 5]> = Vec::new();
    let mut ids: Vec<&str> = Vec::new();
    let mut excluded = corpus.records.len() - labeled.len();
    for example in &labeled {
        if example.labels.any_missing() {
            excluded += 1;
            continue;
        }
        let mut row = [false; 5];
        for (i, (_, label)) in example.labels.iter().enumerate() {
            row[i] = label == Some(true);
        }
        rows_all.push(row);
        ids.push(example.id.as_str());
    }

    let settings: Vec<(&str, String)> = vec![
        ("command", "analyze".into()),
        ("kind", "prevalence".into()),
        ("corpus", corpus_path.display().to_string()),
    ];
    let header = header_for(&settings, None);

    let mut groups = vec![prevalence_row("all", &rows_all)?];
    if let Some(path) = outcomes_path {
        let outcomes = read_outcomes(&path).map_err(data)?;
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for (row, id) in rows_all.iter().zip(&ids) {
            match outcomes.get(*id) {
                Some(true) => positive.push(*row),
                Some(false) => negative.push(*row),
                None => {}
            }
        }
        groups.push(prevalence_row("outcome=1", &positive)?);
        groups.push(prevalence_row("outcome=0", &negative)?);
    }

    if let Some(path) = out_csv {
        let mut csv =
            String::from("group,n,authority,care,fairness,loyalty,sanctity\n");
        for g in &groups {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                g.group,
                g.n,
                format_f64(g.authority),
                format_f64(g.care),
                format_f64(g.fairness),
                format_f64(g.loyalty),
                format_f64(g.sanctity)
            ));
        }
        write_text(&path, &format!("{}\n{csv}", header.comment_line()))?;
    }
    emit_json(
        out.as_ref(),
        &PrevalenceReportDto {
            header: HeaderDto::from_header(&header),
            excluded_missing_labels: excluded,
            groups,
        },
    )
}

#[derive(Serialize)]
struct LengthBiasDto {
    header: HeaderDto,
    method: String,
    documents: usize,
    r_raw: f64,
    r_normalized: f64,
}

fn length_bias(args: AnalyzeArgs, config: mftk::config::ConfigFile) -> Result<(), CliError> {
    let corpus_path = require_path(&args.corpus, &config, "corpus")?;
    let method = Method::parse(&require_string(&args.method, &config, "method")?)?;
    let lexicon_path = require_path(&args.lexicon, &config, "lexicon")?;
    let out = resolve_path(&args.out, &config, "out");

    let scorer = WordCountScorer::load(method, &lexicon_path)?;
    let corpus = read_corpus(&corpus_path).map_err(data)?;
    let tokenized: Vec<_> = corpus.documents().iter().map(tokenize).collect();

    let report = length_bias_report(&tokenized, |tdoc| scorer.matched_tokens(tdoc) as f64)
        .map_err(data)?;

    let settings: Vec<(&str, String)> = vec![
        ("command", "analyze".into()),
        ("kind", "length-bias".into()),
        ("corpus", corpus_path.display().to_string()),
        ("method", method.name().into()),
        ("lexicon", lexicon_path.display().to_string()),
    ];
    let header = header_for(&settings, None);
    emit_json(
        out.as_ref(),
        &LengthBiasDto {
            header: HeaderDto::from_header(&header),
            method: method.name().to_string(),
            documents: report.documents,
            r_raw: report.r_raw,
            r_normalized: report.r_normalized,
        },
    )
}

#[derive(Serialize)]
struct GroupStatsDto {
    group: String,
    n: usize,
    mean: BTreeMap<&'static str, f64>,
    ci_half_width: BTreeMap<&'static str, f64>,
}

impl GroupStatsDto {
    fn from_stats(stats: &GroupStats) -> GroupStatsDto {
        let to_map = |scores: &FoundationScores| {
            Foundation::ALL
                .into_iter()
                .map(|f| (f.name(), scores.get(f)))
                .collect()
        };
        GroupStatsDto {
            group: stats.label.clone(),
            n: stats.count,
            mean: to_map(&stats.mean),
            ci_half_width: to_map(&stats.ci_half_width),
        }
    }
}

#[derive(Serialize)]
struct KeywordBiasDto {
    header: HeaderDto,
    method: String,
    keyword_a: String,
    keyword_b: String,
    groups: Vec<GroupStatsDto>,
}

fn keyword_bias(args: AnalyzeArgs, config: mftk::config::ConfigFile) -> Result<(), CliError> {
    let corpus_path = require_path(&args.corpus, &config, "corpus")?;
    let method = Method::parse(&require_string(&args.method, &config, "method")?)?;
    let lexicon_path = require_path(&args.lexicon, &config, "lexicon")?;
    let keyword_a = require_string(&args.keyword_a, &config, "keyword-a")?.to_lowercase();
    let keyword_b = require_string(&args.keyword_b, &config, "keyword-b")?.to_lowercase();
    let out = resolve_path(&args.out, &config, "out");
    let out_csv = resolve_path(&args.out_csv, &config, "out-csv");

    let scorer = WordCountScorer::load(method, &lexicon_path)?;
    let corpus = read_corpus(&corpus_path).map_err(data)?;
    let tokenized: Vec<_> = corpus.documents().iter().map(tokenize).collect();

    let report =
        keyword_group_means(&tokenized, |tdoc| scorer.score(tdoc), &keyword_a, &keyword_b)
            .map_err(data)?;

    let settings: Vec<(&str, String)> = vec![
        ("command", "analyze".into()),
        ("kind", "keyword-bias".into()),
        ("corpus", corpus_path.display().to_string()),
        ("method", method.name().into()),
        ("lexicon", lexicon_path.display().to_string()),
        ("keyword-a", keyword_a.clone()),
        ("keyword-b", keyword_b.clone()),
    ];
    let header = header_for(&settings, None);

    let groups = vec![
        GroupStatsDto::from_stats(&report.group_a),
        GroupStatsDto::from_stats(&report.group_b),
        GroupStatsDto::from_stats(&report.neither),
    ];
    if let Some(path) = out_csv {
        let mut csv = String::from("group,foundation,mean,ci_low,ci_high,n\n");
        for g in &groups {
            for f in Foundation::ALL {
                let mean = g.mean[f.name()];
                let half = g.ci_half_width[f.name()];
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    g.group,
                    f.name(),
                    format_f64(mean),
                    format_f64(mean - half),
                    format_f64(mean + half),
                    g.n
                ));
            }
        }
        write_text(&path, &format!("{}\n{csv}", header.comment_line()))?;
    }
    emit_json(
        out.as_ref(),
        &KeywordBiasDto {
            header: HeaderDto::from_header(&header),
            method: method.name().to_string(),
            keyword_a,
            keyword_b,
            groups,
        },
    )
}
