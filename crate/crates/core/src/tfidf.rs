//! tf-idf featurization with smoothed idf and L2-normalized rows:
//! idf(t) = ln((1 + N) / (1 + df(t))) + 1, tf = raw count.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

// Inherent std float methods shadow this trait under cfg(test).
#[cfg_attr(test, allow(unused_imports))]
use crate::math::FloatExt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfIdfError {
    EmptyCorpus,
}

impl fmt::Display for TfIdfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("cannot fit tf-idf on an empty corpus")
    }
}

impl core::error::Error for TfIdfError {}

/// A sparse feature vector: `(column, value)` pairs sorted by column.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn zero() -> SparseVector {
        SparseVector::default()
    }

    /// Builds from pairs, summing duplicates and dropping zeros.
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>) -> SparseVector {
        pairs.sort_unstable_by_key(|(col, _)| *col);
        let mut entries: Vec<(u32, f64)> = Vec::with_capacity(pairs.len());
        for (col, value) in pairs {
            match entries.last_mut() {
                Some((last, slot)) if *last == col => *slot += value,
                _ => entries.push((col, value)),
            }
        }
        entries.retain(|(_, v)| *v != 0.0);
        SparseVector { entries }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<u32> {
        self.entries.last().map(|(col, _)| *col)
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(col, value)| value * dense[col as usize])
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, v)| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for (_, v) in &mut self.entries {
            *v *= factor;
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = alloc::vec![0.0; dim];
        for &(col, value) in &self.entries {
            out[col as usize] = value;
        }
        out
    }
}

/// A fitted tf-idf vocabulary: lexicographically ordered columns, smoothed
/// idf weights, and the training document count. The vocabulary is built
/// only from training data; unseen tokens are ignored at transform time.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfModel {
    vocabulary: BTreeMap<String, u32>,
    idf: Vec<f64>,
    document_count: usize,
}

impl TfIdfModel {
    pub fn vocabulary_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn document_count(&self) -> usize {
        self.document_count
    }

    pub fn column(&self, token: &str) -> Option<u32> {
        self.vocabulary.get(token).copied()
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    /// Tokens in column order.
    pub fn tokens(&self) -> impl Iterator<Item = (&str, u32)> {
        self.vocabulary.iter().map(|(t, c)| (t.as_str(), *c))
    }

    /// Rebuild from stored parts (model deserialization).
    pub fn from_parts(
        vocabulary: BTreeMap<String, u32>,
        idf: Vec<f64>,
        document_count: usize,
    ) -> Option<TfIdfModel> {
        if idf.len() != vocabulary.len() {
            return None;
        }
        Some(TfIdfModel {
            vocabulary,
            idf,
            document_count,
        })
    }
}

/// Fit the vocabulary and idf weights on a corpus of filtered token lists.
pub fn fit_tfidf(corpus: &[Vec<String>]) -> Result<TfIdfModel, TfIdfError> {
    if corpus.is_empty() {
        return Err(TfIdfError::EmptyCorpus);
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for tokens in corpus {
        let mut seen: alloc::collections::BTreeSet<&str> = alloc::collections::BTreeSet::new();
        for token in tokens {
            if seen.insert(token) {
                *df.entry(token).or_insert(0) += 1;
            }
        }
    }
    let n = corpus.len();
    let mut vocabulary = BTreeMap::new();
    let mut idf = Vec::with_capacity(df.len());
    // BTreeMap iteration gives the lexicographic column order.
    for (column, (token, count)) in df.into_iter().enumerate() {
        vocabulary.insert(String::from(token), column as u32);
        idf.push(((1 + n) as f64 / (1 + count) as f64).ln() + 1.0);
    }
    Ok(TfIdfModel {
        vocabulary,
        idf,
        document_count: n,
    })
}

/// Transform a token list into an L2-normalized tf-idf vector. Tokens
/// outside the fitted vocabulary are ignored; an all-unseen list yields the
/// zero vector.
pub fn transform_tfidf(model: &TfIdfModel, tokens: &[String]) -> SparseVector {
    let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
    for token in tokens {
        if let Some(column) = model.column(token) {
            *counts.entry(column).or_insert(0.0) += 1.0;
        }
    }
    let pairs: Vec<(u32, f64)> = counts
        .into_iter()
        .map(|(column, tf)| (column, tf * model.idf[column as usize]))
        .collect();
    let mut vector = SparseVector::from_pairs(pairs);
    let norm = vector.l2_norm();
    if norm > 0.0 {
        vector.scale(1.0 / norm);
    }
    vector
}
