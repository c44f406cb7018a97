//! Versioned JSON persistence for trained tf-idf + linear models.
//!
//! Doubles are written in serde_json's shortest-round-trip decimal form,
//! so save → load reproduces bit-identical weights.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use mftk_core::linear::{CvGridResult, LinearClassifier, LossKind};
use mftk_core::tfidf::TfIdfModel;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{FORMAT_VERSION, TOOLKIT_VERSION};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("model file does not parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
    #[error("model file is internally inconsistent: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvPoint {
    pub c: f64,
    pub mean_auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub per_c: Vec<CvPoint>,
    pub chosen_c: f64,
}

impl CvSummary {
    pub fn from_result(result: &CvGridResult) -> CvSummary {
        CvSummary {
            per_c: result
                .per_c
                .iter()
                .map(|&(c, mean_auc)| CvPoint { c, mean_auc })
                .collect(),
            chosen_c: result.chosen_c,
        }
    }
}

/// The saved form of a trained model: vocabulary in column order, idf
/// weights, classifier weights and bias, loss kind, and C, plus the seed
/// and any cross-validation summary from training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub format_version: u32,
    pub toolkit_version: String,
    pub foundation: String,
    pub loss_kind: String,
    pub c: f64,
    pub seed: Option<u64>,
    pub document_count: usize,
    /// Tokens in column order; the index is the feature column.
    pub vocabulary: Vec<String>,
    pub idf: Vec<f64>,
    pub weights: Vec<f64>,
    pub bias: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cv: Option<CvSummary>,
}

impl SavedModel {
    pub fn new(
        foundation: &str,
        tfidf: &TfIdfModel,
        classifier: &LinearClassifier,
        seed: Option<u64>,
        cv: Option<CvSummary>,
    ) -> SavedModel {
        let mut vocabulary = vec![String::new(); tfidf.vocabulary_size()];
        for (token, column) in tfidf.tokens() {
            vocabulary[column as usize] = token.to_string();
        }
        SavedModel {
            format_version: FORMAT_VERSION,
            toolkit_version: TOOLKIT_VERSION.to_string(),
            foundation: foundation.to_string(),
            loss_kind: classifier.loss_kind.name().to_string(),
            c: classifier.c,
            seed,
            document_count: tfidf.document_count(),
            vocabulary,
            idf: tfidf.idf().to_vec(),
            weights: classifier.weights.clone(),
            bias: classifier.bias,
            cv,
        }
    }

    pub fn tfidf(&self) -> Result<TfIdfModel, ModelError> {
        let mut vocabulary = BTreeMap::new();
        for (column, token) in self.vocabulary.iter().enumerate() {
            if vocabulary.insert(token.clone(), column as u32).is_some() {
                return Err(ModelError::Inconsistent(format!(
                    "duplicate vocabulary token {token:?}"
                )));
            }
        }
        TfIdfModel::from_parts(vocabulary, self.idf.clone(), self.document_count)
            .ok_or_else(|| ModelError::Inconsistent("idf/vocabulary length mismatch".into()))
    }

    pub fn classifier(&self) -> Result<LinearClassifier, ModelError> {
        let loss_kind = LossKind::parse(&self.loss_kind).ok_or_else(|| {
            ModelError::Inconsistent(format!("unknown loss kind {:?}", self.loss_kind))
        })?;
        if self.weights.len() != self.vocabulary.len() {
            return Err(ModelError::Inconsistent(
                "weights/vocabulary length mismatch".into(),
            ));
        }
        Ok(LinearClassifier {
            weights: self.weights.clone(),
            bias: self.bias,
            loss_kind,
            c: self.c,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let mut writer = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut writer, self)?;
        writer.write_all(b"\n")?;
        writer.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<SavedModel, ModelError> {
        let reader = BufReader::new(File::open(path)?);
        let model: SavedModel = serde_json::from_reader(reader)?;
        if model.format_version != FORMAT_VERSION {
            return Err(ModelError::UnsupportedVersion(model.format_version));
        }
        Ok(model)
    }
}
