//! Embedding-similarity scoring: foundation centroids from seed words,
//! document centroids from tokens, cosine similarity between the two.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::foundation::Foundation;
// Inherent std float methods shadow this trait under cfg(test).
#[cfg_attr(test, allow(unused_imports))]
use crate::math::FloatExt;
use crate::text::TokenizedDoc;

/// Bundled per-foundation seed words, `foundation\tword1,word2,…` per line.
pub const DEFAULT_SEEDS_TSV: &str = include_str!("../data/ddr_seeds.tsv");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DdrError {
    /// A line whose vector length differs from the table dimension (1-based).
    InconsistentDimension(usize),
    /// A line that does not parse as `word f1 … fk`.
    MalformedLine(usize),
    /// Centroid requested for an empty word list.
    EmptyWordList,
    /// A centroid with zero norm: the input cannot be scored.
    ZeroVector(ZeroVectorSide),
}

/// Which centroid of the cosine degenerated to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroVectorSide {
    Document,
    Foundation,
}

impl fmt::Display for DdrError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DdrError::InconsistentDimension(line) => {
                write!(f, "inconsistent embedding dimension at line {line}")
            }
            DdrError::MalformedLine(line) => write!(f, "malformed embedding line {line}"),
            DdrError::EmptyWordList => f.write_str("empty word list"),
            DdrError::ZeroVector(ZeroVectorSide::Document) => {
                f.write_str("document centroid has zero norm")
            }
            DdrError::ZeroVector(ZeroVectorSide::Foundation) => {
                f.write_str("foundation centroid has zero norm")
            }
        }
    }
}

impl core::error::Error for DdrError {}

/// Static word vectors: a fixed dimension and a map from lowercase word to
/// a dense vector of that length.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// Words in lexicographic order with their vectors.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(w, v)| (w.as_str(), v.as_slice()))
    }
}

/// Parse the plain-text embedding format: one record per line,
/// `word f1 f2 … fk` with single-space separators and decimal floats. The
/// dimension is fixed by the first record; words are lowercased and a
/// duplicate word keeps the last record.
pub fn parse_embeddings(source: &str) -> Result<EmbeddingTable, DdrError> {
    let mut dimension = None;
    let mut vectors = BTreeMap::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(' ').filter(|f| !f.is_empty());
        let word = fields
            .next()
            .ok_or(DdrError::MalformedLine(line_no))?
            .to_lowercase();
        let mut vector = Vec::new();
        for field in fields {
            let value: f64 = field.parse().map_err(|_| DdrError::MalformedLine(line_no))?;
            if !value.is_finite() {
                return Err(DdrError::MalformedLine(line_no));
            }
            vector.push(value);
        }
        if vector.is_empty() {
            return Err(DdrError::MalformedLine(line_no));
        }
        match dimension {
            None => dimension = Some(vector.len()),
            Some(k) if k != vector.len() => {
                return Err(DdrError::InconsistentDimension(line_no))
            }
            Some(_) => {}
        }
        vectors.insert(word, vector);
    }
    match dimension {
        Some(dimension) => Ok(EmbeddingTable { dimension, vectors }),
        None => Err(DdrError::MalformedLine(1)),
    }
}

/// The seed words whose embedding centroid represents one foundation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    pub foundation: Foundation,
    pub words: Vec<String>,
}

impl SeedSet {
    /// Deduplicates while preserving first-occurrence order; lowercases.
    pub fn new(foundation: Foundation, words: impl IntoIterator<Item = String>) -> SeedSet {
        let mut seen = alloc::collections::BTreeSet::new();
        let mut out = Vec::new();
        for word in words {
            let word = word.to_lowercase();
            if seen.insert(word.clone()) {
                out.push(word);
            }
        }
        SeedSet {
            foundation,
            words: out,
        }
    }
}

/// Parse a seed-set file: `foundation\tword1,word2,…` per line. Returns one
/// set per foundation in canonical order; a foundation listed twice keeps
/// the last line.
pub fn parse_seed_sets(source: &str) -> Result<[SeedSet; 5], String> {
    let mut sets: [Option<SeedSet>; 5] = [None, None, None, None, None];
    for (idx, line) in source.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, words) = line
            .split_once('\t')
            .ok_or_else(|| alloc::format!("seed line {} missing tab", idx + 1))?;
        let foundation = Foundation::parse(name.trim())
            .ok_or_else(|| alloc::format!("unknown foundation {:?} on seed line {}", name, idx + 1))?;
        let words: Vec<String> = words
            .split(',')
            .map(|w| w.trim().to_owned())
            .filter(|w| !w.is_empty())
            .collect();
        if words.is_empty() {
            return Err(alloc::format!("empty seed list on line {}", idx + 1));
        }
        sets[foundation.index()] = Some(SeedSet::new(foundation, words));
    }
    let mut out = Vec::with_capacity(5);
    for f in Foundation::ALL {
        match sets[f.index()].take() {
            Some(set) => out.push(set),
            None => return Err(alloc::format!("missing seed set for {f}")),
        }
    }
    Ok(out.try_into().expect("five seed sets"))
}

/// The bundled per-foundation seed sets.
pub fn default_seed_sets() -> [SeedSet; 5] {
    parse_seed_sets(DEFAULT_SEEDS_TSV).expect("bundled seed file is well-formed")
}

/// Mean of the word vectors; out-of-vocabulary words contribute the zero
/// vector and still count toward the divisor.
pub fn centroid(words: &[impl AsRef<str>], table: &EmbeddingTable) -> Result<Vec<f64>, DdrError> {
    if words.is_empty() {
        return Err(DdrError::EmptyWordList);
    }
    let mut sum = alloc::vec![0.0f64; table.dimension()];
    for word in words {
        if let Some(vector) = table.get(word.as_ref()) {
            for (slot, v) in sum.iter_mut().zip(vector) {
                *slot += v;
            }
        }
    }
    for slot in &mut sum {
        *slot /= words.len() as f64;
    }
    Ok(sum)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cosine similarity, clamped to [-1, 1] after computing.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let value = dot / (norm(a) * norm(b));
    value.clamp(-1.0, 1.0)
}

/// The document-to-foundation score: cosine between the document's token
/// centroid and the seed-word centroid. A zero-norm centroid on either side
/// is an error, not a score of zero, so unscoreable inputs cannot
/// masquerade as neutral in downstream analyses.
pub fn ddr_score(
    tdoc: &TokenizedDoc,
    seeds: &SeedSet,
    table: &EmbeddingTable,
) -> Result<f64, DdrError> {
    if tdoc.tokens.is_empty() {
        return Err(DdrError::ZeroVector(ZeroVectorSide::Document));
    }
    let doc_centroid = centroid(&tdoc.tokens, table)?;
    if norm(&doc_centroid) == 0.0 {
        return Err(DdrError::ZeroVector(ZeroVectorSide::Document));
    }
    let seed_centroid = centroid(&seeds.words, table)?;
    if norm(&seed_centroid) == 0.0 {
        return Err(DdrError::ZeroVector(ZeroVectorSide::Foundation));
    }
    Ok(cosine(&doc_centroid, &seed_centroid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn table(entries: &[(&str, &[f64])]) -> EmbeddingTable {
        let mut source = String::new();
        for (word, vector) in entries {
            source.push_str(word);
            for v in *vector {
                source.push(' ');
                source.push_str(&v.to_string());
            }
            source.push('\n');
        }
        parse_embeddings(&source).unwrap()
    }

    fn tdoc(tokens: &[&str]) -> TokenizedDoc {
        TokenizedDoc {
            doc_id: String::from("d"),
            tokens: tokens.iter().map(|t| String::from(*t)).collect(),
            lemmas: tokens.iter().map(|t| String::from(*t)).collect(),
        }
    }

    #[test]
    fn parse_two_line_table() {
        let t = parse_embeddings("a 1.0 0.0\nb 0.0 1.0\n").unwrap();
        assert_eq!(t.dimension(), 2);
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("a"), Some(&[1.0, 0.0][..]));
    }

    #[test]
    fn parse_rejects_dimension_change() {
        let err = parse_embeddings("a 1.0 0.0\nb 0.0 1.0\nc 1.0 2.0 3.0\n").unwrap_err();
        assert_eq!(err, DdrError::InconsistentDimension(3));
    }

    #[test]
    fn parse_rejects_garbage_and_duplicates_keep_last() {
        assert_eq!(
            parse_embeddings("a one two\n").unwrap_err(),
            DdrError::MalformedLine(1)
        );
        let t = parse_embeddings("a 1.0\na 2.0\n").unwrap();
        assert_eq!(t.get("a"), Some(&[2.0][..]));
    }

    #[test]
    fn centroid_examples() {
        let t = table(&[("w", &[2.0, 0.0]), ("w1", &[1.0, 1.0]), ("w2", &[1.0, -1.0])]);
        assert_eq!(centroid(&["w"], &t).unwrap(), [2.0, 0.0]);
        assert_eq!(centroid(&["w1", "w2"], &t).unwrap(), [1.0, 0.0]);
        // OOV contributes a zero vector but still divides.
        assert_eq!(centroid(&["w", "oov"], &t).unwrap(), [1.0, 0.0]);
        assert_eq!(
            centroid(&[] as &[&str], &t).unwrap_err(),
            DdrError::EmptyWordList
        );
    }

    #[test]
    fn ddr_score_examples() {
        let t = table(&[
            ("x", &[1.0, 0.0]),
            ("y", &[0.0, 1.0]),
            ("xy", &[1.0, 1.0]),
        ]);
        let seeds_x = SeedSet::new(Foundation::Care, vec![String::from("x")]);

        // Identical centroids.
        assert!((ddr_score(&tdoc(&["x"]), &seeds_x, &t).unwrap() - 1.0).abs() < 1e-15);
        // Orthogonal centroids.
        assert_eq!(ddr_score(&tdoc(&["y"]), &seeds_x, &t).unwrap(), 0.0);
        // Hand cosine: cos((1,1), (1,0)) = 1/sqrt(2).
        let s = ddr_score(&tdoc(&["xy"]), &seeds_x, &t).unwrap();
        assert!((s - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn zero_vector_errors() {
        let t = table(&[("x", &[1.0, 0.0])]);
        let seeds = SeedSet::new(Foundation::Care, vec![String::from("x")]);
        // All-OOV document.
        assert_eq!(
            ddr_score(&tdoc(&["oov", "oov2"]), &seeds, &t).unwrap_err(),
            DdrError::ZeroVector(ZeroVectorSide::Document)
        );
        // Empty document.
        assert_eq!(
            ddr_score(&tdoc(&[]), &seeds, &t).unwrap_err(),
            DdrError::ZeroVector(ZeroVectorSide::Document)
        );
        // All-OOV seed set.
        let oov_seeds = SeedSet::new(Foundation::Care, vec![String::from("zzz")]);
        assert_eq!(
            ddr_score(&tdoc(&["x"]), &oov_seeds, &t).unwrap_err(),
            DdrError::ZeroVector(ZeroVectorSide::Foundation)
        );
    }

    #[test]
    fn default_seed_sets_match_reference_lists() {
        let sets = default_seed_sets();
        assert_eq!(sets[0].foundation, Foundation::Authority);
        assert_eq!(
            sets[0].words,
            ["authority", "obey", "respect", "tradition", "subversion", "disobey", "disrespect", "chaos"]
        );
        assert_eq!(
            sets[1].words,
            ["kindness", "compassion", "nurture", "empathy", "suffer", "cruel", "hurt", "harm"]
        );
        assert_eq!(
            sets[2].words,
            [
                "equality", "egalitarian", "justice", "nondiscriminatory", "prejudice",
                "inequality", "discrimination", "biased", "proportional", "merit", "deserving",
                "reciprocal", "disproportionate", "cheating", "favoritism", "recognition"
            ]
        );
        assert_eq!(
            sets[3].words,
            ["loyal", "solidarity", "patriot", "fidelity", "betray", "treason", "disloyal", "traitor"]
        );
        assert_eq!(
            sets[4].words,
            ["purity", "sanctity", "sacred", "wholesome", "impurity", "depravity", "degradation", "unnatural"]
        );
    }

    #[test]
    fn synthetic_file_round_trips_byte_exactly() {
        // Ten records rendered with shortest-round-trip floats: parsing
        // and re-rendering reproduces the file byte for byte.
        let mut rng = crate::rng::SplitMix64::new(40);
        let mut source = String::new();
        for i in 0..10 {
            source.push_str(&alloc::format!("word{i:02}"));
            for _ in 0..4 {
                source.push(' ');
                source.push_str(&alloc::format!("{}", rng.next_f64() * 2.0 - 1.0));
            }
            source.push('\n');
        }
        let table = parse_embeddings(&source).unwrap();
        assert_eq!(table.len(), 10);
        let mut rendered = String::new();
        for (word, vector) in table.iter() {
            rendered.push_str(word);
            for v in vector {
                rendered.push(' ');
                rendered.push_str(&alloc::format!("{v}"));
            }
            rendered.push('\n');
        }
        assert_eq!(rendered, source);
        assert_eq!(parse_embeddings(&rendered).unwrap(), table);
    }

    fn arb_vector() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0f64..10.0, 3)
    }

    proptest! {
        // Cosine is symmetric and bounded.
        #[test]
        fn cosine_symmetric_and_bounded(a in arb_vector(), b in arb_vector()) {
            prop_assume!(norm(&a) > 1e-6 && norm(&b) > 1e-6);
            let ab = cosine(&a, &b);
            let ba = cosine(&b, &a);
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&ab));
        }

        // Scaling every embedding by a positive constant leaves the score
        // unchanged to 1e-12.
        #[test]
        fn scale_invariance(a in arb_vector(), b in arb_vector(), scale in 0.01f64..100.0) {
            prop_assume!(norm(&a) > 1e-6 && norm(&b) > 1e-6);
            let scaled_a: Vec<f64> = a.iter().map(|x| x * scale).collect();
            let scaled_b: Vec<f64> = b.iter().map(|x| x * scale).collect();
            prop_assert!((cosine(&a, &b) - cosine(&scaled_a, &scaled_b)).abs() < 1e-12);
        }
    }
}
