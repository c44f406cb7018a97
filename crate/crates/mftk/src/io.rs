//! On-disk formats: JSONL corpora, CSV score files, and the join that
//! pairs external scores with labels for evaluation.
//!
//! Corpora are line-delimited JSON records
//! `{"id": …, "text": …, "labels": {"authority": 0|1|null, …}}` with the
//! labels object optional for unlabeled documents. Scores are flat CSV
//! `id,foundation,score,source,error` (the error column is empty for
//! normal rows and names the failure for documents a scorer could not
//! handle). Every file this crate emits starts with a `#` header line
//! carrying the toolkit version, seed, and config hash; readers skip `#`
//! lines wherever they appear.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use mftk_core::eval::ScoredSet;
use mftk_core::foundation::{Foundation, FoundationLabels};
use mftk_core::text::Document;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{FORMAT_VERSION, TOOLKIT_VERSION};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    SchemaViolation { line: usize, message: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { id: String, line: usize },
    #[error("line {line}: malformed row: {message}")]
    MalformedRow { line: usize, message: String },
    #[error("line {line}: unknown foundation {name:?}")]
    UnknownFoundation { name: String, line: usize },
    #[error("no score for document {doc_id:?}, foundation {foundation}")]
    MissingScore { doc_id: String, foundation: String },
    #[error("document {doc_id:?}, foundation {foundation}: {count} scores match; pass --source to disambiguate")]
    AmbiguousSource {
        doc_id: String,
        foundation: String,
        count: usize,
    },
    #[error("id {id:?} contains a character not allowed in CSV ids")]
    InvalidId { id: String },
}

/// Metadata stamped into the `#` header line of every emitted file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileHeader {
    pub seed: Option<u64>,
    pub config_hash: u64,
}

impl FileHeader {
    pub fn new(seed: Option<u64>, config_hash: u64) -> FileHeader {
        FileHeader { seed, config_hash }
    }

    pub fn comment_line(&self) -> String {
        let seed = match self.seed {
            Some(s) => s.to_string(),
            None => "-".to_string(),
        };
        format!(
            "# mftk {TOOLKIT_VERSION} format={FORMAT_VERSION} seed={seed} config={:016x}",
            self.config_hash
        )
    }
}

/// Serialized label object: 0, 1, or null per foundation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct LabelsDto {
    pub authority: Option<u8>,
    pub care: Option<u8>,
    pub fairness: Option<u8>,
    pub loyalty: Option<u8>,
    pub sanctity: Option<u8>,
}

impl LabelsDto {
    fn fields(&self) -> [Option<u8>; 5] {
        [self.authority, self.care, self.fairness, self.loyalty, self.sanctity]
    }

    pub fn from_labels(labels: &FoundationLabels) -> LabelsDto {
        let v: Vec<Option<u8>> = labels.as_array().iter().map(|o| o.map(u8::from)).collect();
        LabelsDto {
            authority: v[0],
            care: v[1],
            fairness: v[2],
            loyalty: v[3],
            sanctity: v[4],
        }
    }

    pub fn to_labels(&self, line: usize) -> Result<FoundationLabels, IoError> {
        let mut out = [None; 5];
        for (slot, value) in out.iter_mut().zip(self.fields()) {
            *slot = match value {
                None => None,
                Some(0) => Some(false),
                Some(1) => Some(true),
                Some(other) => {
                    return Err(IoError::SchemaViolation {
                        line,
                        message: format!("label value {other} is not 0, 1, or null"),
                    })
                }
            };
        }
        Ok(FoundationLabels::from_array(out))
    }
}

/// One corpus line: id, text, and an optional labels object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<LabelsDto>,
}

impl CorpusRecord {
    pub fn document(&self) -> Document {
        Document::new(self.id.clone(), self.text.clone())
    }

    pub fn labeled(&self, line: usize) -> Result<Option<mftk_core::dataset::LabeledExample>, IoError> {
        match &self.labels {
            None => Ok(None),
            Some(dto) => Ok(Some(mftk_core::dataset::LabeledExample {
                id: self.id.clone(),
                text: self.text.clone(),
                labels: dto.to_labels(line)?,
            })),
        }
    }

    pub fn from_labeled(example: &mftk_core::dataset::LabeledExample) -> CorpusRecord {
        CorpusRecord {
            id: example.id.clone(),
            text: example.text.clone(),
            labels: Some(LabelsDto::from_labels(&example.labels)),
        }
    }
}

/// A parsed corpus file, preserving input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub records: Vec<CorpusRecord>,
}

impl Corpus {
    pub fn documents(&self) -> Vec<Document> {
        self.records.iter().map(CorpusRecord::document).collect()
    }

    /// Labeled examples for every record carrying labels.
    pub fn labeled_examples(&self) -> Result<Vec<mftk_core::dataset::LabeledExample>, IoError> {
        let mut out = Vec::new();
        for (i, record) in self.records.iter().enumerate() {
            if let Some(example) = record.labeled(i + 1)? {
                out.push(example);
            }
        }
        Ok(out)
    }
}

/// Streaming JSONL read; `#` lines skipped, duplicate ids rejected, input
/// order preserved.
pub fn read_corpus(path: &Path) -> Result<Corpus, IoError> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let record: CorpusRecord =
            serde_json::from_str(&line).map_err(|e| IoError::SchemaViolation {
                line: line_no,
                message: e.to_string(),
            })?;
        if record.id.is_empty() {
            return Err(IoError::SchemaViolation {
                line: line_no,
                message: "empty id".to_string(),
            });
        }
        if let Some(dto) = &record.labels {
            dto.to_labels(line_no)?;
        }
        if !seen.insert(record.id.clone()) {
            return Err(IoError::DuplicateId {
                id: record.id.clone(),
                line: line_no,
            });
        }
        records.push(record);
    }
    Ok(Corpus { records })
}

/// Canonical JSONL write: header line, then one compact record per line.
pub fn write_corpus(
    path: &Path,
    records: &[CorpusRecord],
    header: &FileHeader,
) -> Result<(), IoError> {
    let mut writer = BufWriter::new(File::create(path)?);
    writeln!(writer, "{}", header.comment_line())?;
    for record in records {
        let json = serde_json::to_string(record).expect("corpus record serializes");
        writeln!(writer, "{json}")?;
    }
    writer.flush()?;
    Ok(())
}

/// One successfully scored (document, foundation) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub doc_id: String,
    pub foundation: Foundation,
    pub score: f64,
    pub source: String,
}

/// A (document, foundation) pair the scorer could not handle; the reason
/// travels in the CSV error column so it is never silently dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreError {
    pub doc_id: String,
    pub foundation: Foundation,
    pub source: String,
    pub error: String,
}

/// Parsed score file: valid records plus errored rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreFile {
    pub records: Vec<ScoreRecord>,
    pub errors: Vec<ScoreError>,
}

pub const SCORES_CSV_COLUMNS: &str = "id,foundation,score,source,error";

fn validate_csv_id(id: &str) -> Result<(), IoError> {
    if id.is_empty() || id.contains(',') || id.contains('\n') || id.contains('\r') {
        return Err(IoError::InvalidId { id: id.to_string() });
    }
    Ok(())
}

/// Serialize a float losslessly: the shortest decimal that parses back to
/// the identical f64 (serde_json's float formatting).
pub fn format_f64(value: f64) -> String {
    serde_json::to_string(&value).expect("finite f64 serializes")
}

/// Write the score CSV: header comment, column header, then one row per
/// record/error in the order given.
pub fn write_scores(
    path: &Path,
    rows: &[Result<ScoreRecord, ScoreError>],
    header: &FileHeader,
) -> Result<(), IoError> {
    let mut writer = BufWriter::new(File::create(path)?);
    writeln!(writer, "{}", header.comment_line())?;
    writeln!(writer, "{SCORES_CSV_COLUMNS}")?;
    for row in rows {
        match row {
            Ok(r) => {
                validate_csv_id(&r.doc_id)?;
                writeln!(
                    writer,
                    "{},{},{},{},",
                    r.doc_id,
                    r.foundation.name(),
                    format_f64(r.score),
                    r.source
                )?;
            }
            Err(e) => {
                validate_csv_id(&e.doc_id)?;
                writeln!(
                    writer,
                    "{},{},,{},{}",
                    e.doc_id,
                    e.foundation.name(),
                    e.source,
                    e.error
                )?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

/// Read a score CSV. Accepts the 4-column exchange header
/// (`id,foundation,score,source`) and the 5-column emitted form with the
/// error column. Rows carrying an error land in `errors`; scores must be
/// finite decimal doubles and foundations must be among the five names.
pub fn read_scores(path: &Path) -> Result<ScoreFile, IoError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = ScoreFile::default();
    let mut seen: BTreeSet<(String, String, String)> = BTreeSet::new();
    let mut header_seen = false;
    let mut has_error_column = false;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            match line.trim_end() {
                "id,foundation,score,source" => has_error_column = false,
                SCORES_CSV_COLUMNS => has_error_column = true,
                other => {
                    return Err(IoError::MalformedRow {
                        line: line_no,
                        message: format!("unexpected header {other:?}"),
                    })
                }
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expected = if has_error_column { 5 } else { 4 };
        if fields.len() != expected {
            return Err(IoError::MalformedRow {
                line: line_no,
                message: format!("expected {expected} fields, found {}", fields.len()),
            });
        }
        let doc_id = fields[0].to_string();
        if doc_id.is_empty() {
            return Err(IoError::MalformedRow {
                line: line_no,
                message: "empty id".to_string(),
            });
        }
        let foundation = Foundation::parse(fields[1]).ok_or_else(|| IoError::UnknownFoundation {
            name: fields[1].to_string(),
            line: line_no,
        })?;
        let source = fields[3].to_string();
        if !seen.insert((doc_id.clone(), fields[1].to_string(), source.clone())) {
            return Err(IoError::MalformedRow {
                line: line_no,
                message: format!(
                    "duplicate record for ({doc_id}, {}, {source})",
                    fields[1]
                ),
            });
        }
        let error_field = if has_error_column { fields[4].trim() } else { "" };
        if !error_field.is_empty() {
            out.errors.push(ScoreError {
                doc_id,
                foundation,
                source,
                error: error_field.to_string(),
            });
            continue;
        }
        let score: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| IoError::MalformedRow {
                line: line_no,
                message: format!("bad score {:?}", fields[2]),
            })?;
        if !score.is_finite() {
            return Err(IoError::MalformedRow {
                line: line_no,
                message: format!("non-finite score {:?}", fields[2]),
            });
        }
        out.records.push(ScoreRecord {
            doc_id,
            foundation,
            score,
            source,
        });
    }
    if !header_seen {
        return Err(IoError::MalformedRow {
            line: 1,
            message: "missing column header".to_string(),
        });
    }
    Ok(out)
}

/// Result of joining scores to labels for one foundation.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinedScores {
    /// Ordered by doc id.
    pub doc_ids: Vec<String>,
    pub scored: ScoredSet,
    /// Labeled documents dropped because their label for the foundation is
    /// missing.
    pub dropped_missing_label: usize,
    /// Labeled documents dropped because their only score row is an error.
    pub dropped_errored_score: usize,
}

/// Inner join of scores and labels on one foundation. Every labeled
/// document with a non-missing label needs exactly one score record from
/// the selected source; documents whose score row is an error are dropped
/// with a count. Output is sorted by doc id.
pub fn join_scores_labels(
    scores: &ScoreFile,
    corpus: &[mftk_core::dataset::LabeledExample],
    foundation: Foundation,
    source: Option<&str>,
) -> Result<JoinedScores, IoError> {
    let mut by_doc: BTreeMap<&str, Vec<&ScoreRecord>> = BTreeMap::new();
    for record in &scores.records {
        if record.foundation != foundation {
            continue;
        }
        if let Some(filter) = source {
            if record.source != filter {
                continue;
            }
        }
        by_doc.entry(record.doc_id.as_str()).or_default().push(record);
    }
    let errored: BTreeSet<&str> = scores
        .errors
        .iter()
        .filter(|e| {
            e.foundation == foundation && source.map(|s| s == e.source).unwrap_or(true)
        })
        .map(|e| e.doc_id.as_str())
        .collect();

    let mut rows: Vec<(&str, f64, bool)> = Vec::new();
    let mut dropped_missing_label = 0usize;
    let mut dropped_errored_score = 0usize;
    for example in corpus {
        let label = match example.labels.get(foundation) {
            Some(label) => label,
            None => {
                dropped_missing_label += 1;
                continue;
            }
        };
        match by_doc.get(example.id.as_str()) {
            Some(records) if records.len() == 1 => {
                rows.push((example.id.as_str(), records[0].score, label));
            }
            Some(records) => {
                return Err(IoError::AmbiguousSource {
                    doc_id: example.id.clone(),
                    foundation: foundation.name().to_string(),
                    count: records.len(),
                });
            }
            None if errored.contains(example.id.as_str()) => {
                dropped_errored_score += 1;
            }
            None => {
                return Err(IoError::MissingScore {
                    doc_id: example.id.clone(),
                    foundation: foundation.name().to_string(),
                });
            }
        }
    }
    rows.sort_by(|a, b| a.0.cmp(b.0));
    let doc_ids: Vec<String> = rows.iter().map(|(id, _, _)| id.to_string()).collect();
    let scores_vec: Vec<f64> = rows.iter().map(|(_, s, _)| *s).collect();
    let labels_vec: Vec<bool> = rows.iter().map(|(_, _, l)| *l).collect();
    let scored = ScoredSet::new(scores_vec, labels_vec).map_err(|_| IoError::MalformedRow {
        line: 0,
        message: "join produced an empty scored set".to_string(),
    })?;
    Ok(JoinedScores {
        doc_ids,
        scored,
        dropped_missing_label,
        dropped_errored_score,
    })
}

/// One raw-annotation line:
/// `{"id": …, "text": …, "annotations": [["harm", …], …], "schema": "twitter"|"reddit"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub id: String,
    pub text: String,
    pub annotations: Vec<Vec<String>>,
    pub schema: String,
}

impl AnnotationRecord {
    pub fn schema(&self) -> Option<mftk_core::dataset::Schema> {
        match self.schema.as_str() {
            "twitter" => Some(mftk_core::dataset::Schema::Twitter),
            "reddit" => Some(mftk_core::dataset::Schema::Reddit),
            _ => None,
        }
    }

    pub fn example(&self) -> mftk_core::dataset::AnnotatedExample {
        mftk_core::dataset::AnnotatedExample {
            id: self.id.clone(),
            text: self.text.clone(),
            annotations: self
                .annotations
                .iter()
                .map(|set| set.iter().cloned().collect())
                .collect(),
        }
    }
}

/// Read a raw-annotation JSONL file; duplicate ids rejected, at least one
/// annotator set required per record.
pub fn read_annotations(path: &Path) -> Result<Vec<AnnotationRecord>, IoError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let record: AnnotationRecord =
            serde_json::from_str(&line).map_err(|e| IoError::SchemaViolation {
                line: line_no,
                message: e.to_string(),
            })?;
        if record.id.is_empty() || record.annotations.is_empty() {
            return Err(IoError::SchemaViolation {
                line: line_no,
                message: "id must be non-empty and annotations non-empty".to_string(),
            });
        }
        if record.schema().is_none() {
            return Err(IoError::SchemaViolation {
                line: line_no,
                message: format!("unknown schema {:?}", record.schema),
            });
        }
        if !seen.insert(record.id.clone()) {
            return Err(IoError::DuplicateId {
                id: record.id.clone(),
                line: line_no,
            });
        }
        out.push(record);
    }
    Ok(out)
}

/// Outcome file: CSV `id,outcome` with outcome 0 or 1; `#` lines skipped.
pub fn read_outcomes(path: &Path) -> Result<BTreeMap<String, bool>, IoError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = BTreeMap::new();
    let mut header_seen = false;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line.trim_end() != "id,outcome" {
                return Err(IoError::MalformedRow {
                    line: line_no,
                    message: format!("unexpected header {:?}", line.trim_end()),
                });
            }
            header_seen = true;
            continue;
        }
        let (id, outcome) = line.split_once(',').ok_or_else(|| IoError::MalformedRow {
            line: line_no,
            message: "expected id,outcome".to_string(),
        })?;
        let outcome = match outcome.trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(IoError::MalformedRow {
                    line: line_no,
                    message: format!("outcome {other:?} is not 0 or 1"),
                })
            }
        };
        if out.insert(id.to_string(), outcome).is_some() {
            return Err(IoError::DuplicateId {
                id: id.to_string(),
                line: line_no,
            });
        }
    }
    Ok(out)
}
