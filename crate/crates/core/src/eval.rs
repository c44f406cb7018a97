//! Threshold-free and thresholded evaluation: AUC by the rank-statistic
//! identity, 20-bin calibration curves, and percentile thresholding with
//! precision/recall/F1/accuracy tables.

use alloc::vec::Vec;
use core::fmt;

// Inherent std float methods shadow this trait under cfg(test).
#[cfg_attr(test, allow(unused_imports))]
use crate::math::FloatExt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    /// Parallel lists empty or of different lengths.
    BadInput,
    /// AUC or the metrics table need both classes present.
    SingleClass,
    /// Calibration requires scores in [0, 1].
    ScoreOutOfRange,
    EmptyScores,
    /// Percentile outside (0, 100).
    InvalidPercentile,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::BadInput => f.write_str("scores and labels must be non-empty and parallel"),
            EvalError::SingleClass => f.write_str("labels contain a single class"),
            EvalError::ScoreOutOfRange => f.write_str("score outside [0, 1]"),
            EvalError::EmptyScores => f.write_str("empty score list"),
            EvalError::InvalidPercentile => f.write_str("percentile must be in (0, 100)"),
        }
    }
}

impl core::error::Error for EvalError {}

/// Parallel scores and binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSet {
    scores: Vec<f64>,
    labels: Vec<bool>,
}

impl ScoredSet {
    pub fn new(scores: Vec<f64>, labels: Vec<bool>) -> Result<ScoredSet, EvalError> {
        if scores.is_empty() || scores.len() != labels.len() {
            return Err(EvalError::BadInput);
        }
        Ok(ScoredSet { scores, labels })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let pos = self.positives();
        pos > 0 && pos < self.len()
    }
}

/// Average ranks (1-based) with ties sharing the mean of their rank range.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite scores"));
    let mut ranks = alloc::vec![0.0f64; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) share the average of ranks i+1..=j+1.
        let shared = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Area under the ROC curve via the rank-statistic identity
/// AUC = (R⁺ − n⁺(n⁺+1)/2) / (n⁺ n⁻) with average ranks for ties; equal to
/// pair counting with ties worth 1/2.
pub fn auc(set: &ScoredSet) -> Result<f64, EvalError> {
    let n_pos = set.positives();
    let n_neg = set.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::SingleClass);
    }
    let ranks = average_ranks(set.scores());
    let rank_sum_pos: f64 = ranks
        .iter()
        .zip(set.labels())
        .filter(|(_, &label)| label)
        .map(|(rank, _)| rank)
        .sum();
    let n_pos = n_pos as f64;
    let n_neg = n_neg as f64;
    Ok((rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg))
}

pub const CALIBRATION_BINS: usize = 20;

/// One calibration bin over [lo, hi): mean score and positive fraction are
/// `None` for empty bins.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean_score: Option<f64>,
    pub positive_fraction: Option<f64>,
}

/// A 20-bin reliability curve over [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub bins: Vec<CalibrationBin>,
}

impl CalibrationReport {
    /// Largest |positive_fraction − mean_score| over non-empty bins.
    pub fn max_deviation(&self) -> f64 {
        self.bins
            .iter()
            .filter_map(|b| Some((b.positive_fraction? - b.mean_score?).abs()))
            .fold(0.0, f64::max)
    }
}

/// Discretize scores into 20 equal-width bins; bin b covers
/// [b/20, (b+1)/20) with the last bin closed at 1.0.
pub fn calibration_curve(set: &ScoredSet) -> Result<CalibrationReport, EvalError> {
    if set.scores().iter().any(|s| !(0.0..=1.0).contains(s)) {
        return Err(EvalError::ScoreOutOfRange);
    }
    let mut counts = [0usize; CALIBRATION_BINS];
    let mut score_sums = [0.0f64; CALIBRATION_BINS];
    let mut positive_counts = [0usize; CALIBRATION_BINS];
    for (&score, &label) in set.scores().iter().zip(set.labels()) {
        let bin = ((score * CALIBRATION_BINS as f64) as usize).min(CALIBRATION_BINS - 1);
        counts[bin] += 1;
        score_sums[bin] += score;
        positive_counts[bin] += label as usize;
    }
    let bins = (0..CALIBRATION_BINS)
        .map(|b| {
            let count = counts[b];
            CalibrationBin {
                lo: b as f64 / CALIBRATION_BINS as f64,
                hi: (b + 1) as f64 / CALIBRATION_BINS as f64,
                count,
                mean_score: (count > 0).then(|| score_sums[b] / count as f64),
                positive_fraction: (count > 0).then(|| positive_counts[b] as f64 / count as f64),
            }
        })
        .collect();
    Ok(CalibrationReport { bins })
}

/// Nearest-rank percentile: the ⌈x/100·n⌉-th smallest score. An item is
/// classified positive iff its score is strictly greater than the
/// threshold, so "top 20%" means above the 80th percentile.
pub fn threshold_at_percentile(scores: &[f64], percentile: f64) -> Result<f64, EvalError> {
    if scores.is_empty() {
        return Err(EvalError::EmptyScores);
    }
    if !(percentile > 0.0 && percentile < 100.0) {
        return Err(EvalError::InvalidPercentile);
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    let n = sorted.len() as f64;
    // Guard the ceil against float noise when x·n/100 is an integer.
    let raw = percentile / 100.0 * n;
    let rank = if (raw - raw.round()).abs() < 1e-9 {
        raw.round()
    } else {
        raw.ceil()
    }
    .max(1.0) as usize;
    Ok(sorted[rank.min(sorted.len()) - 1])
}

/// The percentile rows reported by the thresholded-metrics table.
pub const TABLE_PERCENTILES: [f64; 6] = [95.0, 90.0, 80.0, 70.0, 60.0, 50.0];

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow {
    pub percentile: f64,
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    /// Set when no example was predicted positive; precision is then
    /// defined as 0.
    pub no_positive_predictions: bool,
}

/// Precision/recall/F1/accuracy at the six standard percentile cutoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTable {
    pub rows: Vec<ThresholdRow>,
}

impl ThresholdTable {
    pub fn row(&self, percentile: f64) -> Option<&ThresholdRow> {
        self.rows.iter().find(|r| r.percentile == percentile)
    }
}

/// Metrics for a single percentile cutoff.
pub fn threshold_metrics_at(set: &ScoredSet, percentile: f64) -> Result<ThresholdRow, EvalError> {
    if !set.has_both_classes() {
        return Err(EvalError::SingleClass);
    }
    let threshold = threshold_at_percentile(set.scores(), percentile)?;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut tn = 0usize;
    let mut fn_ = 0usize;
    for (&score, &label) in set.scores().iter().zip(set.labels()) {
        let predicted = score > threshold;
        match (predicted, label) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let predicted_pos = tp + fp;
    let precision = if predicted_pos > 0 {
        tp as f64 / predicted_pos as f64
    } else {
        0.0
    };
    let recall = tp as f64 / (tp + fn_) as f64;
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    let accuracy = (tp + tn) as f64 / set.len() as f64;
    Ok(ThresholdRow {
        percentile,
        threshold,
        precision,
        recall,
        f1,
        accuracy,
        no_positive_predictions: predicted_pos == 0,
    })
}

/// The full six-row table at percentiles 95/90/80/70/60/50.
pub fn threshold_metrics_table(set: &ScoredSet) -> Result<ThresholdTable, EvalError> {
    let rows = TABLE_PERCENTILES
        .iter()
        .map(|&p| threshold_metrics_at(set, p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ThresholdTable { rows })
}
