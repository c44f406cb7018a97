//! L2-regularized linear classifiers trained by deterministic full-batch
//! gradient descent with backtracking line search.
//!
//! The objective is (1/2)‖w‖² + C·Σᵢ loss(yᵢ, w·xᵢ + b) with the bias
//! unregularized. Logistic loss is the primary model; the hinge loss backs
//! the linear SVM baseline. Training is deterministic (zero initialization,
//! a deterministic step schedule, no stochastic passes), so identical
//! inputs produce bit-identical weights on every run.

use alloc::vec::Vec;
use core::fmt;

use crate::eval::{auc, ScoredSet};
// Inherent std float methods shadow this trait under cfg(test).
#[cfg_attr(test, allow(unused_imports))]
use crate::math::FloatExt;
use crate::rng::SplitMix64;
use crate::tfidf::SparseVector;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearError {
    /// Training labels contain a single class.
    DegenerateLabels,
    /// A feature value is NaN or infinite.
    NonFiniteFeature,
    /// Feature/label lengths disagree, or a feature index exceeds the
    /// declared dimension.
    DimensionMismatch,
    /// Too few positives or negatives for the requested stratified folds.
    InsufficientClassCounts,
}

impl fmt::Display for LinearError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinearError::DegenerateLabels => f.write_str("labels contain a single class"),
            LinearError::NonFiniteFeature => f.write_str("non-finite feature value"),
            LinearError::DimensionMismatch => f.write_str("feature dimension mismatch"),
            LinearError::InsufficientClassCounts => {
                f.write_str("not enough examples of each class for stratified folds")
            }
        }
    }
}

impl core::error::Error for LinearError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Logistic,
    Hinge,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Logistic => "logistic",
            LossKind::Hinge => "hinge",
        }
    }

    pub fn parse(name: &str) -> Option<LossKind> {
        match name {
            "logistic" => Some(LossKind::Logistic),
            "hinge" => Some(LossKind::Hinge),
            _ => None,
        }
    }
}

/// A trained linear model: weight vector, bias, loss kind, and the inverse
/// regularization strength it was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearClassifier {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub loss_kind: LossKind,
    pub c: f64,
}

impl LinearClassifier {
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    /// Raw decision value w·x + b.
    pub fn decision(&self, x: &SparseVector) -> Result<f64, LinearError> {
        if let Some(max) = x.max_index() {
            if max as usize >= self.weights.len() {
                return Err(LinearError::DimensionMismatch);
            }
        }
        Ok(x.dot(&self.weights) + self.bias)
    }

    /// Sigmoid of the decision value. For the logistic loss this estimates
    /// p(f | d); for the hinge loss it is a monotone map of the margin,
    /// valid for ranking but not as a probability.
    pub fn predict_proba(&self, x: &SparseVector) -> Result<f64, LinearError> {
        Ok(sigmoid(self.decision(x)?))
    }
}

/// Numerically stable σ(z).
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^(-m)) without overflow for very negative margins.
fn logistic_loss(margin: f64) -> f64 {
    if margin > 0.0 {
        (-margin).exp().ln_1p()
    } else {
        -margin + margin.exp().ln_1p()
    }
}

/// Objective value and gradient of
/// (1/2)‖w‖² + C·Σ loss_i at (w, b). Public so callers can verify
/// convergence or check the gradient against finite differences.
pub fn objective_and_gradient(
    features: &[SparseVector],
    labels: &[bool],
    loss_kind: LossKind,
    c: f64,
    weights: &[f64],
    bias: f64,
) -> (f64, Vec<f64>, f64) {
    let mut value = 0.5 * weights.iter().map(|w| w * w).sum::<f64>();
    let mut grad_w: Vec<f64> = weights.to_vec();
    let mut grad_b = 0.0;

    for (x, &label) in features.iter().zip(labels) {
        let y = if label { 1.0 } else { -1.0 };
        let z = x.dot(weights) + bias;
        let margin = y * z;
        // d loss / d z
        let dz = match loss_kind {
            LossKind::Logistic => {
                value += c * logistic_loss(margin);
                -y * sigmoid(-margin)
            }
            LossKind::Hinge => {
                value += c * (1.0 - margin).max(0.0);
                // Subgradient 0 at margin exactly 1.
                if margin < 1.0 {
                    -y
                } else {
                    0.0
                }
            }
        };
        if dz != 0.0 {
            let scaled = c * dz;
            for (col, feature) in x.iter() {
                grad_w[col as usize] += scaled * feature;
            }
            grad_b += scaled;
        }
    }
    (value, grad_w, grad_b)
}

const MAX_ITERATIONS: usize = 10_000;
const GRADIENT_TOLERANCE: f64 = 1e-6;
const ARMIJO_C1: f64 = 1e-4;
const BACKTRACK_FACTOR: f64 = 0.5;
const MIN_STEP: f64 = 1e-20;

fn validate_training_input(
    features: &[SparseVector],
    labels: &[bool],
    dimension: usize,
) -> Result<(), LinearError> {
    if features.len() != labels.len() {
        return Err(LinearError::DimensionMismatch);
    }
    let mut saw_pos = false;
    let mut saw_neg = false;
    for &label in labels {
        saw_pos |= label;
        saw_neg |= !label;
    }
    if !(saw_pos && saw_neg) {
        return Err(LinearError::DegenerateLabels);
    }
    for x in features {
        if let Some(max) = x.max_index() {
            if max as usize >= dimension {
                return Err(LinearError::DimensionMismatch);
            }
        }
        if x.iter().any(|(_, v)| !v.is_finite()) {
            return Err(LinearError::NonFiniteFeature);
        }
    }
    Ok(())
}

/// Train a linear classifier on sparse rows of the given dimension.
///
/// Full-batch gradient descent from zero with Armijo backtracking;
/// converged when the gradient infinity-norm drops below 1e-6, capped at
/// 10,000 iterations. The accepted objective value never increases across
/// iterations (the line search guarantees descent on this convex
/// objective).
pub fn train_linear(
    features: &[SparseVector],
    labels: &[bool],
    dimension: usize,
    loss_kind: LossKind,
    c: f64,
) -> Result<LinearClassifier, LinearError> {
    validate_training_input(features, labels, dimension)?;
    debug_assert!(c > 0.0);

    let mut weights = alloc::vec![0.0f64; dimension];
    let mut bias = 0.0f64;
    let (mut value, mut grad_w, mut grad_b) =
        objective_and_gradient(features, labels, loss_kind, c, &weights, bias);
    // Warm-start the line search from twice the last accepted step so
    // strongly regularized or large-C runs do not re-shrink from 1.0
    // every iteration.
    let mut step_init = 1.0f64;

    for _ in 0..MAX_ITERATIONS {
        let grad_inf = grad_w
            .iter()
            .chain(core::iter::once(&grad_b))
            .fold(0.0f64, |acc, g| acc.max(g.abs()));
        if grad_inf < GRADIENT_TOLERANCE {
            break;
        }
        let grad_sq = grad_w.iter().map(|g| g * g).sum::<f64>() + grad_b * grad_b;

        let mut step = step_init;
        loop {
            let candidate_w: Vec<f64> = weights
                .iter()
                .zip(&grad_w)
                .map(|(w, g)| w - step * g)
                .collect();
            let candidate_b = bias - step * grad_b;
            let (cand_value, cand_gw, cand_gb) =
                objective_and_gradient(features, labels, loss_kind, c, &candidate_w, candidate_b);
            if cand_value <= value - ARMIJO_C1 * step * grad_sq {
                weights = candidate_w;
                bias = candidate_b;
                value = cand_value;
                grad_w = cand_gw;
                grad_b = cand_gb;
                step_init = (step * 2.0).min(1.0);
                break;
            }
            step *= BACKTRACK_FACTOR;
            if step < MIN_STEP {
                // No acceptable descent step at float resolution.
                return Ok(LinearClassifier {
                    weights,
                    bias,
                    loss_kind,
                    c,
                });
            }
        }
    }

    Ok(LinearClassifier {
        weights,
        bias,
        loss_kind,
        c,
    })
}

/// The default hyperparameter grid: C in whole decades from 1e-7 to 1e7.
pub fn default_c_grid() -> Vec<f64> {
    (-7..=7).map(|exp| 10.0f64.powi(exp)).collect()
}

/// Mean validation AUC per grid value and the winning C.
#[derive(Debug, Clone, PartialEq)]
pub struct CvGridResult {
    /// `(c, mean validation AUC over folds)` in grid order.
    pub per_c: Vec<(f64, f64)>,
    pub chosen_c: f64,
}

/// Stratified fold ids from a seeded shuffle: positives and negatives are
/// shuffled separately and dealt round-robin, so every fold holds at least
/// one example of each class whenever counts allow.
fn stratified_fold_ids(labels: &[bool], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = SplitMix64::new(seed);
    let mut positives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let mut negatives: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    rng.shuffle(&mut positives);
    rng.shuffle(&mut negatives);
    let mut fold_of = alloc::vec![0usize; labels.len()];
    for (k, &i) in positives.iter().enumerate() {
        fold_of[i] = k % folds;
    }
    for (k, &i) in negatives.iter().enumerate() {
        fold_of[i] = k % folds;
    }
    fold_of
}

/// Pick C by the highest mean validation AUC over stratified folds; ties
/// break toward the smaller C. Requires at least `folds` positives and
/// `folds` negatives.
pub fn cross_validate_c(
    features: &[SparseVector],
    labels: &[bool],
    dimension: usize,
    loss_kind: LossKind,
    grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<CvGridResult, LinearError> {
    validate_training_input(features, labels, dimension)?;
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives < folds || negatives < folds || folds < 2 {
        return Err(LinearError::InsufficientClassCounts);
    }
    let mut grid: Vec<f64> = grid.to_vec();
    grid.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    grid.dedup();

    let fold_of = stratified_fold_ids(labels, folds, seed);

    let mut per_c = Vec::with_capacity(grid.len());
    let mut chosen_c = grid[0];
    let mut best_auc = f64::NEG_INFINITY;
    for &c in &grid {
        let mut auc_sum = 0.0;
        for fold in 0..folds {
            let mut train_x = Vec::new();
            let mut train_y = Vec::new();
            let mut val_scores = Vec::new();
            let mut val_labels = Vec::new();
            for i in 0..labels.len() {
                if fold_of[i] == fold {
                    val_labels.push(labels[i]);
                } else {
                    train_x.push(features[i].clone());
                    train_y.push(labels[i]);
                }
            }
            let model = train_linear(&train_x, &train_y, dimension, loss_kind, c)?;
            for i in 0..labels.len() {
                if fold_of[i] == fold {
                    val_scores.push(model.decision(&features[i])?);
                }
            }
            let scored = ScoredSet::new(val_scores, val_labels.clone())
                .expect("validation fold is non-empty");
            auc_sum += auc(&scored).expect("stratified fold holds both classes");
        }
        let mean_auc = auc_sum / folds as f64;
        per_c.push((c, mean_auc));
        // Strictly greater keeps the smallest C on ties (grid ascending).
        if mean_auc > best_auc {
            best_auc = mean_auc;
            chosen_c = c;
        }
    }
    Ok(CvGridResult { per_c, chosen_c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn dense_rows(rows: &[&[f64]]) -> Vec<SparseVector> {
        rows.iter()
            .map(|row| {
                SparseVector::from_pairs(
                    row.iter()
                        .enumerate()
                        .map(|(i, &v)| (i as u32, v))
                        .collect(),
                )
            })
            .collect()
    }

    #[test]
    fn zero_model_predicts_half() {
        let model = LinearClassifier {
            weights: vec![0.0; 3],
            bias: 0.0,
            loss_kind: LossKind::Logistic,
            c: 1.0,
        };
        let x = SparseVector::from_pairs(vec![(0, 1.0), (2, -4.0)]);
        assert_eq!(model.predict_proba(&x).unwrap(), 0.5);
    }

    #[test]
    fn sigmoid_of_ln3_is_three_quarters() {
        let model = LinearClassifier {
            weights: vec![1.0],
            bias: 0.0,
            loss_kind: LossKind::Logistic,
            c: 1.0,
        };
        let x = SparseVector::from_pairs(vec![(0, 3.0f64.ln())]);
        assert!((model.predict_proba(&x).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn predict_is_monotone_in_decision_value() {
        let model = LinearClassifier {
            weights: vec![2.0],
            bias: -1.0,
            loss_kind: LossKind::Logistic,
            c: 1.0,
        };
        let mut last = 0.0;
        for step in 0..20 {
            let x = SparseVector::from_pairs(vec![(0, step as f64 * 0.5 - 3.0)]);
            let p = model.predict_proba(&x).unwrap();
            assert!(p > last);
            last = p;
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let model = LinearClassifier {
            weights: vec![0.0; 2],
            bias: 0.0,
            loss_kind: LossKind::Logistic,
            c: 1.0,
        };
        let x = SparseVector::from_pairs(vec![(5, 1.0)]);
        assert_eq!(model.predict_proba(&x).unwrap_err(), LinearError::DimensionMismatch);
    }

    #[test]
    fn separable_1d_data_orders_correctly() {
        let features = dense_rows(&[&[-1.0], &[1.0]]);
        let labels = vec![false, true];
        let model = train_linear(&features, &labels, 1, LossKind::Logistic, 10.0).unwrap();
        let p_neg = model.predict_proba(&features[0]).unwrap();
        let p_pos = model.predict_proba(&features[1]).unwrap();
        assert!(p_pos > p_neg);
        assert!(p_pos > 0.5 && p_neg < 0.5);
    }

    #[test]
    fn degenerate_and_nonfinite_inputs_error() {
        let features = dense_rows(&[&[1.0], &[2.0]]);
        assert_eq!(
            train_linear(&features, &[true, true], 1, LossKind::Logistic, 1.0).unwrap_err(),
            LinearError::DegenerateLabels
        );
        let bad = vec![
            SparseVector::from_pairs(vec![(0, f64::NAN)]),
            SparseVector::from_pairs(vec![(0, 1.0)]),
        ];
        assert_eq!(
            train_linear(&bad, &[true, false], 1, LossKind::Logistic, 1.0).unwrap_err(),
            LinearError::NonFiniteFeature
        );
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        // Random 5x3 instance from the seeded generator.
        let mut rng = SplitMix64::new(11);
        let features: Vec<SparseVector> = (0..5)
            .map(|_| {
                SparseVector::from_pairs(
                    (0..3)
                        .map(|col| (col as u32, rng.next_f64() * 2.0 - 1.0))
                        .collect(),
                )
            })
            .collect();
        let labels = vec![true, false, true, true, false];
        let weights: Vec<f64> = (0..3).map(|_| rng.next_f64() - 0.5).collect();
        let bias = rng.next_f64() - 0.5;

        for loss in [LossKind::Logistic, LossKind::Hinge] {
            let (_, grad_w, grad_b) =
                objective_and_gradient(&features, &labels, loss, 2.0, &weights, bias);
            let h = 1e-5;
            for dim in 0..=3 {
                let mut lo_w = weights.clone();
                let mut hi_w = weights.clone();
                let (mut lo_b, mut hi_b) = (bias, bias);
                if dim < 3 {
                    lo_w[dim] -= h;
                    hi_w[dim] += h;
                } else {
                    lo_b -= h;
                    hi_b += h;
                }
                let (f_lo, _, _) =
                    objective_and_gradient(&features, &labels, loss, 2.0, &lo_w, lo_b);
                let (f_hi, _, _) =
                    objective_and_gradient(&features, &labels, loss, 2.0, &hi_w, hi_b);
                let numeric = (f_hi - f_lo) / (2.0 * h);
                let analytic = if dim < 3 { grad_w[dim] } else { grad_b };
                let scale = analytic.abs().max(1.0);
                assert!(
                    (numeric - analytic).abs() / scale < 1e-6,
                    "loss {:?} dim {dim}: numeric {numeric} vs analytic {analytic}",
                    loss
                );
            }
        }
    }

    #[test]
    fn objective_never_increases_during_training() {
        let mut rng = SplitMix64::new(5);
        let features: Vec<SparseVector> = (0..40)
            .map(|_| {
                SparseVector::from_pairs(
                    (0..4)
                        .map(|col| (col as u32, rng.next_f64() * 2.0 - 1.0))
                        .collect(),
                )
            })
            .collect();
        let labels: Vec<bool> = (0..40).map(|i| i % 3 == 0).collect();
        for loss in [LossKind::Logistic, LossKind::Hinge] {
            let model = train_linear(&features, &labels, 4, loss, 1.0).unwrap();
            // Descent from zero: final objective is at most the initial one.
            let (at_zero, _, _) =
                objective_and_gradient(&features, &labels, loss, 1.0, &[0.0; 4], 0.0);
            let (at_model, _, _) = objective_and_gradient(
                &features,
                &labels,
                loss,
                1.0,
                &model.weights,
                model.bias,
            );
            assert!(at_model <= at_zero);
        }
    }

    #[test]
    fn training_is_bit_deterministic() {
        let mut rng = SplitMix64::new(9);
        let features: Vec<SparseVector> = (0..30)
            .map(|_| {
                SparseVector::from_pairs(
                    (0..3)
                        .map(|col| (col as u32, rng.next_f64() * 2.0 - 1.0))
                        .collect(),
                )
            })
            .collect();
        let labels: Vec<bool> = (0..30).map(|i| i % 2 == 0).collect();
        let a = train_linear(&features, &labels, 3, LossKind::Logistic, 0.5).unwrap();
        let b = train_linear(&features, &labels, 3, LossKind::Logistic, 0.5).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.bias.to_bits(), b.bias.to_bits());
    }

    #[test]
    fn cv_single_value_grid_and_tie_rule() {
        let mut rng = SplitMix64::new(21);
        // Separable: x > 0 labeled positive.
        let features: Vec<SparseVector> = (0..60)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                SparseVector::from_pairs(vec![(0, sign * (0.5 + rng.next_f64()))])
            })
            .collect();
        let labels: Vec<bool> = (0..60).map(|i| i % 2 == 0).collect();

        let single =
            cross_validate_c(&features, &labels, 1, LossKind::Logistic, &[0.25], 10, 7).unwrap();
        assert_eq!(single.chosen_c, 0.25);

        // Separable data saturates AUC at every C: tie rule keeps the
        // smallest.
        let grid = [1e-3, 1e-1, 1e1];
        let result =
            cross_validate_c(&features, &labels, 1, LossKind::Logistic, &grid, 10, 7).unwrap();
        assert_eq!(result.chosen_c, 1e-3);
        for (_, mean_auc) in &result.per_c {
            assert!((mean_auc - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cv_requires_enough_of_each_class() {
        let features = dense_rows(&[&[1.0], &[-1.0], &[0.5], &[-0.5]]);
        let labels = vec![true, false, true, false];
        assert_eq!(
            cross_validate_c(&features, &labels, 1, LossKind::Logistic, &[1.0], 10, 0)
                .unwrap_err(),
            LinearError::InsufficientClassCounts
        );
    }

    #[test]
    fn cv_is_deterministic_per_seed() {
        let mut rng = SplitMix64::new(33);
        let features: Vec<SparseVector> = (0..50)
            .map(|_| {
                SparseVector::from_pairs(
                    (0..2)
                        .map(|col| (col as u32, rng.next_f64() * 2.0 - 1.0))
                        .collect(),
                )
            })
            .collect();
        let labels: Vec<bool> = (0..50).map(|i| i % 2 == 0).collect();
        let grid = [1e-2, 1.0];
        let a = cross_validate_c(&features, &labels, 2, LossKind::Logistic, &grid, 5, 13).unwrap();
        let b = cross_validate_c(&features, &labels, 2, LossKind::Logistic, &grid, 5, 13).unwrap();
        assert_eq!(a, b);
        let other =
            cross_validate_c(&features, &labels, 2, LossKind::Logistic, &grid, 5, 14).unwrap();
        assert_eq!(other.chosen_c, a.chosen_c); // same winner either way
    }

    // Non-blocking report comparing the two losses on noisy synthetic
    // data; which one wins is data-dependent, so nothing is asserted
    // beyond both models training.
    #[test]
    fn logistic_vs_hinge_report() {
        let mut rng = SplitMix64::new(2468);
        let make = |rng: &mut SplitMix64, n: usize| {
            let mut features = Vec::with_capacity(n);
            let mut labels = Vec::with_capacity(n);
            for _ in 0..n {
                let x: Vec<f64> = (0..4).map(|_| rng.next_f64() * 2.0 - 1.0).collect();
                let signal = x[0] - 0.5 * x[1] + 0.25 * x[2];
                let noise = rng.next_f64() * 2.0 - 1.0;
                labels.push(signal + 0.8 * noise > 0.0);
                features.push(SparseVector::from_pairs(
                    x.into_iter().enumerate().map(|(i, v)| (i as u32, v)).collect(),
                ));
            }
            (features, labels)
        };
        let (train_x, train_y) = make(&mut rng, 300);
        let (test_x, test_y) = make(&mut rng, 300);
        let mut aucs = Vec::new();
        for loss in [LossKind::Logistic, LossKind::Hinge] {
            let model = train_linear(&train_x, &train_y, 4, loss, 1.0).unwrap();
            let scores: Vec<f64> = test_x.iter().map(|x| model.decision(x).unwrap()).collect();
            let value = auc(&ScoredSet::new(scores, test_y.clone()).unwrap()).unwrap();
            aucs.push((loss.name(), value));
        }
        println!("loss comparison on held-out synthetic data: {aucs:?}");
        for (_, value) in aucs {
            assert!(value > 0.5);
        }
    }

    // Rank equivalence: hinge decision values and their sigmoid map give
    // the same AUC (monotone transform). Labels follow a noisy linear rule
    // so the trained model is non-degenerate and decisions are separated
    // well beyond float resolution.
    #[test]
    fn hinge_sigmoid_is_rank_equivalent() {
        let mut rng = SplitMix64::new(17);
        let features: Vec<SparseVector> = (0..30)
            .map(|_| {
                SparseVector::from_pairs(
                    (0..3)
                        .map(|col| (col as u32, rng.next_f64() * 2.0 - 1.0))
                        .collect(),
                )
            })
            .collect();
        let labels: Vec<bool> = features
            .iter()
            .enumerate()
            .map(|(i, x)| x.dot(&[1.0, -0.5, 0.25]) + ((i % 5) as f64 - 2.0) * 0.2 > 0.0)
            .collect();
        let model = train_linear(&features, &labels, 3, LossKind::Hinge, 1.0).unwrap();
        let decisions: Vec<f64> = features.iter().map(|x| model.decision(x).unwrap()).collect();
        let probs: Vec<f64> = features
            .iter()
            .map(|x| model.predict_proba(x).unwrap())
            .collect();
        let auc_d = auc(&ScoredSet::new(decisions, labels.clone()).unwrap()).unwrap();
        let auc_p = auc(&ScoredSet::new(probs, labels).unwrap()).unwrap();
        assert!((auc_d - auc_p).abs() < 1e-12);
    }
}
