//! Annotation aggregation for the Twitter/Reddit schemas, highlight-based
//! sentence labeling for the news schema, and the two splitting
//! procedures: single-foundation stratified splits and greedy iterative
//! stratification for multi-label corpora.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::foundation::{Foundation, FoundationLabels};
// Inherent std float methods shadow this trait under cfg(test).
#[cfg_attr(test, allow(unused_imports))]
use crate::math::FloatExt;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetError {
    /// A raw annotation label outside the schema's vocabulary.
    UnknownRawLabel(String),
    /// A highlight or sentence span outside the article text.
    SpanOutOfBounds,
    /// Sentence spans must be ordered and non-overlapping.
    UnorderedSpans,
    /// The foundation has no positive or no negative examples.
    DegenerateLabels,
    /// Fractions must be positive and sum to 1 (±1e-9).
    BadFractions,
    /// Iterative stratification requires fully observed labels.
    MissingLabel(String),
    EmptyCorpus,
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::UnknownRawLabel(label) => write!(f, "unknown raw label {label:?}"),
            DatasetError::SpanOutOfBounds => f.write_str("span outside the article text"),
            DatasetError::UnorderedSpans => {
                f.write_str("sentence spans must be ordered and non-overlapping")
            }
            DatasetError::DegenerateLabels => f.write_str("labels contain a single class"),
            DatasetError::BadFractions => {
                f.write_str("fractions must be positive and sum to 1")
            }
            DatasetError::MissingLabel(id) => write!(f, "example {id:?} has a missing label"),
            DatasetError::EmptyCorpus => f.write_str("empty corpus"),
        }
    }
}

impl core::error::Error for DatasetError {}

/// Annotation schema for raw-label aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    Twitter,
    Reddit,
}

/// One example with its per-annotator raw label sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedExample {
    pub id: String,
    pub text: String,
    pub annotations: Vec<BTreeSet<String>>,
}

/// A text with resolved binary foundation labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledExample {
    pub id: String,
    pub text: String,
    pub labels: FoundationLabels,
}

/// Map one raw annotation label to its foundation. Virtue and vice names
/// collapse onto the base foundation; `Ok(None)` marks labels that count as
/// "no foundation" (non-moral, and thin morality under the Reddit schema).
fn map_raw_label(label: &str, schema: Schema) -> Result<Option<Foundation>, DatasetError> {
    let normalized = label.trim().to_lowercase();
    let mapped = match normalized.as_str() {
        "authority" | "subversion" => Some(Foundation::Authority),
        "care" | "harm" => Some(Foundation::Care),
        "fairness" | "cheating" => Some(Foundation::Fairness),
        "loyalty" | "betrayal" => Some(Foundation::Loyalty),
        "sanctity" | "purity" | "degradation" => Some(Foundation::Sanctity),
        "non-moral" | "nonmoral" => None,
        // Reddit-only labels.
        "equality" | "proportionality" if schema == Schema::Reddit => Some(Foundation::Fairness),
        "thin morality" if schema == Schema::Reddit => None,
        _ => return Err(DatasetError::UnknownRawLabel(String::from(label))),
    };
    Ok(mapped)
}

/// Resolve annotator label sets into binary foundation labels: a
/// foundation is 1 iff at least one annotator's set maps to it. The result
/// is independent of annotator order.
pub fn aggregate_annotations(
    example: &AnnotatedExample,
    schema: Schema,
) -> Result<LabeledExample, DatasetError> {
    let mut labels = FoundationLabels::all_zero();
    for annotation in &example.annotations {
        for raw in annotation {
            if let Some(foundation) = map_raw_label(raw, schema)? {
                labels.set(foundation, Some(true));
            }
        }
    }
    Ok(LabeledExample {
        id: example.id.clone(),
        text: example.text.clone(),
        labels,
    })
}

/// A highlight: a character span of the article annotated with one
/// foundation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Highlight {
    pub start: usize,
    pub end: usize,
    pub foundation: Foundation,
}

/// An article with its foundation highlights (news schema). Spans are
/// character offsets into `text`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HighlightedArticle {
    pub id: String,
    pub text: String,
    pub highlights: Vec<Highlight>,
}

/// Label each sentence span: foundation f is 1 iff the sentence intersects
/// (by at least one character) any highlight labeled f. Foundations with no
/// highlight anywhere in the article were never assigned to it, so their
/// labels are missing rather than 0.
pub fn label_sentences(
    article: &HighlightedArticle,
    sentence_spans: &[(usize, usize)],
) -> Result<Vec<LabeledExample>, DatasetError> {
    let text_len = article.text.chars().count();
    for h in &article.highlights {
        if h.start >= h.end || h.end > text_len {
            return Err(DatasetError::SpanOutOfBounds);
        }
    }
    let mut previous_end = 0usize;
    for &(start, end) in sentence_spans {
        if start >= end || end > text_len {
            return Err(DatasetError::SpanOutOfBounds);
        }
        if start < previous_end {
            return Err(DatasetError::UnorderedSpans);
        }
        previous_end = end;
    }

    let mut assigned = [false; 5];
    for h in &article.highlights {
        assigned[h.foundation.index()] = true;
    }

    let chars: Vec<char> = article.text.chars().collect();
    let mut out = Vec::with_capacity(sentence_spans.len());
    for (sentence_index, &(start, end)) in sentence_spans.iter().enumerate() {
        let mut labels = FoundationLabels::all_missing();
        for f in Foundation::ALL {
            if assigned[f.index()] {
                labels.set(f, Some(false));
            }
        }
        for h in &article.highlights {
            if start < h.end && h.start < end {
                labels.set(h.foundation, Some(true));
            }
        }
        out.push(LabeledExample {
            id: alloc::format!("{}#{}", article.id, sentence_index),
            text: chars[start..end].iter().collect(),
            labels,
        });
    }
    Ok(out)
}

/// A naive sentence segmenter splitting after `.`, `?`, and `!` runs:
/// a convenience for corpora without externally supplied spans. Returns
/// character spans; abbreviations and quotations are not handled.
pub fn naive_sentence_spans(text: &str) -> Vec<(usize, usize)> {
    let chars: Vec<char> = text.chars().collect();
    let mut spans = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        if matches!(chars[i], '.' | '?' | '!') {
            while i + 1 < chars.len() && matches!(chars[i + 1], '.' | '?' | '!') {
                i += 1;
            }
            let end = i + 1;
            if chars[start..end].iter().any(|c| !c.is_whitespace()) {
                spans.push((start, end));
            }
            start = end;
        }
        i += 1;
    }
    if start < chars.len() && chars[start..].iter().any(|c| !c.is_whitespace()) {
        spans.push((start, chars.len()));
    }
    spans
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Split on one foundation with a 1-test_fraction : test_fraction ratio,
/// stratified by that foundation. Examples whose label for the foundation
/// is missing are excluded first (and returned separately). The test set
/// holds round(test_fraction·n) examples with the positive count within
/// one example of the global fraction; the shuffle is seeded, and both
/// output sides preserve input order.
pub fn stratified_split(
    corpus: &[LabeledExample],
    foundation: Foundation,
    test_fraction: f64,
    seed: u64,
) -> Result<StratifiedSplit, DatasetError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(DatasetError::BadFractions);
    }
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    let mut excluded = Vec::new();
    for (i, example) in corpus.iter().enumerate() {
        match example.labels.get(foundation) {
            Some(true) => positives.push(i),
            Some(false) => negatives.push(i),
            None => excluded.push(i),
        }
    }
    if positives.is_empty() || negatives.is_empty() {
        return Err(DatasetError::DegenerateLabels);
    }
    let n = positives.len() + negatives.len();
    // Round-half-up sizing; on tiny corpora the test side may come out
    // empty.
    let test_size = round_half_up(test_fraction * n as f64).min(n);
    let mut test_pos = round_half_up(test_fraction * positives.len() as f64);
    // Keep the negative demand satisfiable.
    test_pos = test_pos
        .min(positives.len())
        .min(test_size)
        .max(test_size.saturating_sub(negatives.len()));
    let test_neg = test_size - test_pos;

    let mut rng = SplitMix64::new(seed);
    rng.shuffle(&mut positives);
    rng.shuffle(&mut negatives);

    let mut in_test = alloc::vec![false; corpus.len()];
    for &i in positives.iter().take(test_pos) {
        in_test[i] = true;
    }
    for &i in negatives.iter().take(test_neg) {
        in_test[i] = true;
    }

    let mut train = Vec::with_capacity(n - test_size);
    let mut test = Vec::with_capacity(test_size);
    let excluded_set: BTreeSet<usize> = excluded.iter().copied().collect();
    for (i, example) in corpus.iter().enumerate() {
        if excluded_set.contains(&i) {
            continue;
        }
        if in_test[i] {
            test.push(example.clone());
        } else {
            train.push(example.clone());
        }
    }
    Ok(StratifiedSplit {
        train,
        test,
        excluded: excluded.into_iter().map(|i| corpus[i].clone()).collect(),
    })
}

/// Output of [`stratified_split`]; `excluded` holds missing-label examples.
#[derive(Debug, Clone, PartialEq)]
pub struct StratifiedSplit {
    pub train: Vec<LabeledExample>,
    pub test: Vec<LabeledExample>,
    pub excluded: Vec<LabeledExample>,
}

/// Greedy iterative stratification of a multi-label corpus into subsets of
/// the given fractions.
///
/// Repeatedly pick the label with the fewest remaining positive examples;
/// assign each of its remaining examples to the subset with the greatest
/// remaining desired quota for that label, breaking ties by overall
/// remaining capacity and then by seeded randomness. Examples with no
/// positive labels are distributed last by capacity. The result is a
/// partition: every example lands in exactly one subset.
pub fn iterative_stratified_split(
    corpus: &[LabeledExample],
    fractions: &[f64],
    seed: u64,
) -> Result<Vec<Vec<LabeledExample>>, DatasetError> {
    if fractions.is_empty()
        || fractions.iter().any(|&f| f <= 0.0)
        || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(DatasetError::BadFractions);
    }
    if corpus.is_empty() {
        return Err(DatasetError::EmptyCorpus);
    }
    for example in corpus {
        if example.labels.any_missing() {
            return Err(DatasetError::MissingLabel(example.id.clone()));
        }
    }

    let subsets = fractions.len();
    let mut rng = SplitMix64::new(seed);

    // Remaining desired counts, per subset overall and per subset × label.
    let mut capacity: Vec<f64> = fractions.iter().map(|f| f * corpus.len() as f64).collect();
    let mut label_quota = alloc::vec![[0.0f64; 5]; subsets];
    let mut label_remaining = [0usize; 5];
    for example in corpus {
        for f in Foundation::ALL {
            if example.labels.get(f) == Some(true) {
                label_remaining[f.index()] += 1;
            }
        }
    }
    for (j, fraction) in fractions.iter().enumerate() {
        for f in Foundation::ALL {
            label_quota[j][f.index()] = fraction * label_remaining[f.index()] as f64;
        }
    }

    let mut assignment = alloc::vec![usize::MAX; corpus.len()];
    let mut unassigned: BTreeSet<usize> = (0..corpus.len()).collect();

    let pick_subset = |scores: &[f64], capacity: &[f64], rng: &mut SplitMix64| -> usize {
        let mut best: Vec<usize> = Vec::new();
        let mut best_score = f64::NEG_INFINITY;
        for (j, &score) in scores.iter().enumerate() {
            if score > best_score {
                best_score = score;
                best.clear();
                best.push(j);
            } else if score == best_score {
                best.push(j);
            }
        }
        if best.len() > 1 {
            // Tie on the primary criterion: fall back to overall capacity.
            let mut cap_best: Vec<usize> = Vec::new();
            let mut cap_score = f64::NEG_INFINITY;
            for &j in &best {
                if capacity[j] > cap_score {
                    cap_score = capacity[j];
                    cap_best.clear();
                    cap_best.push(j);
                } else if capacity[j] == cap_score {
                    cap_best.push(j);
                }
            }
            best = cap_best;
        }
        if best.len() > 1 {
            best[rng.next_below(best.len() as u64) as usize]
        } else {
            best[0]
        }
    };

    loop {
        // The label with the fewest remaining positive examples.
        let rarest = Foundation::ALL
            .into_iter()
            .filter(|f| label_remaining[f.index()] > 0)
            .min_by_key(|f| (label_remaining[f.index()], f.index()));
        let Some(label) = rarest else { break };

        let members: Vec<usize> = unassigned
            .iter()
            .copied()
            .filter(|&i| corpus[i].labels.get(label) == Some(true))
            .collect();
        for i in members {
            let quotas: Vec<f64> = (0..subsets).map(|j| label_quota[j][label.index()]).collect();
            let subset = pick_subset(&quotas, &capacity, &mut rng);
            assignment[i] = subset;
            unassigned.remove(&i);
            capacity[subset] -= 1.0;
            for f in Foundation::ALL {
                if corpus[i].labels.get(f) == Some(true) {
                    label_quota[subset][f.index()] -= 1.0;
                    label_remaining[f.index()] -= 1;
                }
            }
        }
    }

    // Label-free examples go wherever the most capacity remains.
    let leftovers: Vec<usize> = unassigned.iter().copied().collect();
    for i in leftovers {
        let subset = pick_subset(&capacity, &capacity, &mut rng);
        assignment[i] = subset;
        capacity[subset] -= 1.0;
    }

    let mut out: Vec<Vec<LabeledExample>> = (0..subsets).map(|_| Vec::new()).collect();
    for (i, example) in corpus.iter().enumerate() {
        out[assignment[i]].push(example.clone());
    }
    Ok(out)
}
