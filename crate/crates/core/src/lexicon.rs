//! The three moral-foundations dictionary formats and their word-count
//! scorers.
//!
//! All three loaders merge virtue and vice categories of the same
//! foundation into one label and drop the "morality general" category.
//! Scoring always tests a token and its lemma; a token contributes at most
//! one increment per foundation regardless of how many entries it matches.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::foundation::{parse_category_label, Foundation, FoundationScores, FoundationSet};
use crate::text::TokenizedDoc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconError {
    /// A line that does not parse under the declared format (1-based).
    MalformedLine(usize),
    /// A category label outside `<foundation>.<virtue|vice>`.
    UnknownFoundationLabel(String),
    /// An eMFD weight outside [0, 1] for the named word.
    WeightOutOfRange(String),
}

impl fmt::Display for LexiconError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexiconError::MalformedLine(line) => write!(f, "malformed lexicon line {line}"),
            LexiconError::UnknownFoundationLabel(label) => {
                write!(f, "unknown foundation label {label:?}")
            }
            LexiconError::WeightOutOfRange(word) => {
                write!(f, "weight out of [0, 1] for word {word:?}")
            }
        }
    }
}

impl core::error::Error for LexiconError {}

/// Prefix-style dictionary (the original MFD): entries match any token that
/// begins with the stored prefix. Backed by a character trie.
#[derive(Debug, Clone)]
pub struct PrefixLexicon {
    nodes: Vec<TrieNode>,
    entries: BTreeMap<String, FoundationSet>,
}

#[derive(Debug, Clone, Default)]
struct TrieNode {
    children: BTreeMap<char, usize>,
    foundations: FoundationSet,
}

impl PrefixLexicon {
    pub fn new() -> PrefixLexicon {
        PrefixLexicon {
            nodes: alloc::vec![TrieNode::default()],
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, prefix: &str, foundations: FoundationSet) {
        let mut node = 0;
        for c in prefix.chars() {
            let next = match self.nodes[node].children.get(&c) {
                Some(&idx) => idx,
                None => {
                    let idx = self.nodes.len();
                    self.nodes.push(TrieNode::default());
                    self.nodes[node].children.insert(c, idx);
                    idx
                }
            };
            node = next;
        }
        self.nodes[node].foundations = self.nodes[node].foundations.union(foundations);
        let slot = self.entries.entry(prefix.to_owned()).or_default();
        *slot = slot.union(foundations);
    }

    /// Union of foundation sets over every entry whose prefix is a prefix
    /// of `word`.
    pub fn match_word(&self, word: &str) -> FoundationSet {
        let mut matched = FoundationSet::EMPTY;
        let mut node = 0;
        for c in word.chars() {
            match self.nodes[node].children.get(&c) {
                Some(&idx) => {
                    node = idx;
                    matched = matched.union(self.nodes[node].foundations);
                }
                None => break,
            }
        }
        matched
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry prefixes as literal strings, for overlap statistics.
    pub fn vocabulary(&self) -> BTreeSet<String> {
        self.entries.keys().cloned().collect()
    }
}

impl Default for PrefixLexicon {
    fn default() -> Self {
        PrefixLexicon::new()
    }
}

/// Exact-word dictionary (MFD 2.0).
#[derive(Debug, Clone, Default)]
pub struct WordLexicon {
    entries: BTreeMap<String, FoundationSet>,
}

impl WordLexicon {
    pub fn new() -> WordLexicon {
        WordLexicon::default()
    }

    pub fn insert(&mut self, word: &str, foundations: FoundationSet) {
        let slot = self.entries.entry(word.to_owned()).or_default();
        *slot = slot.union(foundations);
    }

    pub fn get(&self, word: &str) -> FoundationSet {
        self.entries.get(word).copied().unwrap_or(FoundationSet::EMPTY)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn vocabulary(&self) -> BTreeSet<String> {
        self.entries.keys().cloned().collect()
    }
}

/// Weighted one-to-many dictionary (eMFD): every word carries five weights
/// in [0, 1].
#[derive(Debug, Clone, Default)]
pub struct WeightedLexicon {
    entries: BTreeMap<String, [f64; 5]>,
}

impl WeightedLexicon {
    pub fn new() -> WeightedLexicon {
        WeightedLexicon::default()
    }

    pub fn insert(&mut self, word: &str, weights: [f64; 5]) -> Result<(), LexiconError> {
        if weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(LexiconError::WeightOutOfRange(word.to_owned()));
        }
        self.entries.insert(word.to_owned(), weights);
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&[f64; 5]> {
        self.entries.get(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn vocabulary(&self) -> BTreeSet<String> {
        self.entries.keys().cloned().collect()
    }
}

fn parse_foundation_field(field: &str, line_no: usize) -> Result<Option<Foundation>, LexiconError> {
    if field.trim().is_empty() {
        return Err(LexiconError::MalformedLine(line_no));
    }
    parse_category_label(field).map_err(LexiconError::UnknownFoundationLabel)
}

/// Parse the prefix format: `prefix*\t<foundation>.<virtue|vice>` per line.
/// A trailing `*` marks the prefix; entries without one are treated as
/// prefixes that happen to be whole words. Lines mapping to the excluded
/// "morality general" category are dropped.
pub fn parse_prefix_lexicon(source: &str) -> Result<PrefixLexicon, LexiconError> {
    let mut lexicon = PrefixLexicon::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (raw_prefix, label) = line
            .split_once('\t')
            .ok_or(LexiconError::MalformedLine(line_no))?;
        let prefix = raw_prefix.trim().trim_end_matches('*').to_lowercase();
        if prefix.is_empty() || !prefix.chars().all(char::is_alphabetic) {
            return Err(LexiconError::MalformedLine(line_no));
        }
        if let Some(f) = parse_foundation_field(label, line_no)? {
            lexicon.insert(&prefix, FoundationSet::singleton(f));
        }
    }
    Ok(lexicon)
}

/// Parse the word format: `word\t<foundation>.<virtue|vice>` per line,
/// repeatable per word. Virtue/vice duplicates collapse into one entry.
pub fn parse_word_lexicon(source: &str) -> Result<WordLexicon, LexiconError> {
    let mut lexicon = WordLexicon::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (raw_word, label) = line
            .split_once('\t')
            .ok_or(LexiconError::MalformedLine(line_no))?;
        let word = raw_word.trim().to_lowercase();
        if word.is_empty() {
            return Err(LexiconError::MalformedLine(line_no));
        }
        if let Some(f) = parse_foundation_field(label, line_no)? {
            lexicon.insert(&word, FoundationSet::singleton(f));
        }
    }
    Ok(lexicon)
}

/// Header required on the first line of the weighted format.
pub const WEIGHTED_HEADER: &str = "word\tauthority\tcare\tfairness\tloyalty\tsanctity";

/// Parse the weighted format: a fixed header line naming the five columns,
/// then `word\tw_auth\tw_care\tw_fair\tw_loy\tw_sanc` per line.
pub fn parse_weighted_lexicon(source: &str) -> Result<WeightedLexicon, LexiconError> {
    let mut lexicon = WeightedLexicon::new();
    let mut lines = source.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end_matches('\r') == WEIGHTED_HEADER => {}
        _ => return Err(LexiconError::MalformedLine(1)),
    }
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let word = fields
            .next()
            .map(str::trim)
            .filter(|w| !w.is_empty())
            .ok_or(LexiconError::MalformedLine(line_no))?
            .to_lowercase();
        let mut weights = [0.0f64; 5];
        for slot in &mut weights {
            let field = fields.next().ok_or(LexiconError::MalformedLine(line_no))?;
            let value: f64 = field
                .trim()
                .parse()
                .map_err(|_| LexiconError::MalformedLine(line_no))?;
            if !value.is_finite() {
                return Err(LexiconError::MalformedLine(line_no));
            }
            *slot = value;
        }
        if fields.next().is_some() {
            return Err(LexiconError::MalformedLine(line_no));
        }
        lexicon.insert(&word, weights)?;
    }
    Ok(lexicon)
}

/// Word-count score with a prefix dictionary: for each token, the token and
/// its lemma are run against the trie and every foundation in the union of
/// matched entries is incremented once; counts are divided by the total
/// number of tokens. A zero-token document scores all zeros.
pub fn score_prefix_count(tdoc: &TokenizedDoc, lexicon: &PrefixLexicon) -> FoundationScores {
    score_by(tdoc, |token, lemma| {
        lexicon.match_word(token).union(lexicon.match_word(lemma))
    })
}

/// Word-count score with an exact-word dictionary; membership is exact
/// match on the token or its lemma, otherwise identical to
/// [`score_prefix_count`].
pub fn score_word_count(tdoc: &TokenizedDoc, lexicon: &WordLexicon) -> FoundationScores {
    score_by(tdoc, |token, lemma| lexicon.get(token).union(lexicon.get(lemma)))
}

fn score_by(
    tdoc: &TokenizedDoc,
    match_fn: impl Fn(&str, &str) -> FoundationSet,
) -> FoundationScores {
    let n = tdoc.token_count();
    if n == 0 {
        return FoundationScores::zeros();
    }
    let mut scores = FoundationScores::zeros();
    for (token, lemma) in tdoc.pairs() {
        for f in match_fn(token, lemma).iter() {
            scores.add(f, 1.0);
        }
    }
    scores.divide(n as f64);
    scores
}

/// Raw number of tokens with at least one match in the matcher, the
/// numerator the length-bias diagnostic correlates against document length.
pub fn matched_token_count(
    tdoc: &TokenizedDoc,
    match_fn: impl Fn(&str, &str) -> bool,
) -> usize {
    tdoc.pairs().filter(|(t, l)| match_fn(t, l)).count()
}

/// Weighted (eMFD) score: sum the five-weight vectors of every matched
/// token, then divide by the number of matched tokens rather than the
/// document length. The surface token is looked up first and its lemma only
/// consulted when the token itself has no entry. No matches scores zeros.
pub fn score_weighted(tdoc: &TokenizedDoc, lexicon: &WeightedLexicon) -> FoundationScores {
    let mut sums = [0.0f64; 5];
    let mut matched = 0usize;
    for (token, lemma) in tdoc.pairs() {
        let weights = lexicon.get(token).or_else(|| lexicon.get(lemma));
        if let Some(weights) = weights {
            for (slot, w) in sums.iter_mut().zip(weights.iter()) {
                *slot += w;
            }
            matched += 1;
        }
    }
    if matched == 0 {
        return FoundationScores::zeros();
    }
    let mut scores = FoundationScores::from_array(sums);
    scores.divide(matched as f64);
    scores
}

/// Vocabulary overlap statistics across the three dictionaries; prefix
/// entries are compared as literal strings.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapReport {
    pub size_a: usize,
    pub size_b: usize,
    pub size_c: usize,
    pub ab: usize,
    pub ac: usize,
    pub bc: usize,
    pub abc: usize,
    /// Fraction of each vocabulary that appears in neither of the others.
    pub unique_frac_a: f64,
    pub unique_frac_b: f64,
    pub unique_frac_c: f64,
}

impl OverlapReport {
    /// |A ∩ B| as a fraction of |A|.
    pub fn ab_frac_of_a(&self) -> f64 {
        self.ab as f64 / self.size_a as f64
    }

    /// |A ∩ B| as a fraction of |B|.
    pub fn ab_frac_of_b(&self) -> f64 {
        self.ab as f64 / self.size_b as f64
    }
}

/// Set algebra over three vocabularies.
pub fn lexicon_stats(
    vocab_a: &BTreeSet<String>,
    vocab_b: &BTreeSet<String>,
    vocab_c: &BTreeSet<String>,
) -> OverlapReport {
    let ab = vocab_a.intersection(vocab_b).count();
    let ac = vocab_a.intersection(vocab_c).count();
    let bc = vocab_b.intersection(vocab_c).count();
    let abc = vocab_a
        .intersection(vocab_b)
        .filter(|w| vocab_c.contains(*w))
        .count();
    let unique = |own: &BTreeSet<String>, other1: &BTreeSet<String>, other2: &BTreeSet<String>| {
        let count = own
            .iter()
            .filter(|w| !other1.contains(*w) && !other2.contains(*w))
            .count();
        count as f64 / own.len().max(1) as f64
    };
    OverlapReport {
        size_a: vocab_a.len(),
        size_b: vocab_b.len(),
        size_c: vocab_c.len(),
        ab,
        ac,
        bc,
        abc,
        unique_frac_a: unique(vocab_a, vocab_b, vocab_c),
        unique_frac_b: unique(vocab_b, vocab_a, vocab_c),
        unique_frac_c: unique(vocab_c, vocab_a, vocab_b),
    }
}
