//! Deterministic tokenization, lemmatization, and token filtering shared by
//! every scorer and featurizer.
//!
//! The tokenizer and the suffix-stripping lemmatizer are fully specified
//! rules rather than a wrapped NLP pipeline, so identical input produces
//! identical output on every platform with no model files. The lemmatizer
//! is deliberately approximate: lexicon lookups always test the surface
//! token *and* its lemma, so an over- or under-stripped lemma can only miss
//! an inflected match, never create a false one for the surface form.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

/// 179 common English function words, one per line.
pub const STOPWORDS_EN: &str = include_str!("../data/stopwords_en.txt");

/// A document to be scored: a unique id and raw UTF-8 text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Document {
        Document {
            id: id.into(),
            text: text.into(),
        }
    }
}

/// The tokenized form of a document: lowercase tokens and their lemmas,
/// index-aligned. `tokens.len()` is the n_d used by every length
/// normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDoc {
    pub doc_id: String,
    pub tokens: Vec<String>,
    pub lemmas: Vec<String>,
}

impl TokenizedDoc {
    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    /// Index-aligned `(token, lemma)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.tokens
            .iter()
            .zip(self.lemmas.iter())
            .map(|(t, l)| (t.as_str(), l.as_str()))
    }
}

#[inline]
fn is_token_char(c: char) -> bool {
    // Letters, digits, apostrophes (ASCII and typographic), hyphen-minus.
    c.is_alphanumeric() || c == '\'' || c == '\u{2019}' || c == '-'
}

/// Split text into maximal runs of letters/digits/apostrophes/hyphens,
/// lowercased. Runs without any letter or digit (e.g. a bare "--") are not
/// tokens. Total over all inputs; empty text yields an empty list.
pub fn tokenize(doc: &Document) -> TokenizedDoc {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut has_alnum = false;

    for c in doc.text.chars() {
        if is_token_char(c) {
            has_alnum |= c.is_alphanumeric();
            for lower in c.to_lowercase() {
                current.push(lower);
            }
        } else if !current.is_empty() {
            if has_alnum {
                tokens.push(core::mem::take(&mut current));
            } else {
                current.clear();
            }
            has_alnum = false;
        }
    }
    if !current.is_empty() && has_alnum {
        tokens.push(current);
    }

    let lemmas = tokens.iter().map(|t| lemmatize(t)).collect();
    TokenizedDoc {
        doc_id: doc.id.clone(),
        tokens,
        lemmas,
    }
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn has_vowel(s: &[u8]) -> bool {
    s.iter().any(|&c| is_vowel(c) || c == b'y')
}

/// Consonant-vowel-consonant ending where the final consonant is not
/// w, x, or y: the "short word" pattern that takes a restored e
/// (mak + ing -> make).
fn ends_cvc(s: &[u8]) -> bool {
    let n = s.len();
    if n < 3 {
        return false;
    }
    let (c1, v, c2) = (s[n - 3], s[n - 2], s[n - 1]);
    !is_vowel(c1) && is_vowel(v) && !is_vowel(c2) && !matches!(c2, b'w' | b'x' | b'y')
}

/// Restore the stem after stripping a verbal -ed/-ing suffix.
fn restore_stem(mut stem: Vec<u8>) -> Vec<u8> {
    let n = stem.len();
    if stem.ends_with(b"at") || stem.ends_with(b"bl") || stem.ends_with(b"iz") {
        stem.push(b'e');
    } else if n >= 2
        && stem[n - 1] == stem[n - 2]
        && !is_vowel(stem[n - 1])
        && !matches!(stem[n - 1], b'l' | b's' | b'z')
    {
        stem.pop();
    } else if n <= 3 && ends_cvc(&stem) {
        stem.push(b'e');
    }
    stem
}

/// One pass of the ordered suffix rules. Returns `None` when no rule fires.
fn strip_once(word: &[u8]) -> Option<Vec<u8>> {
    let n = word.len();
    if n < 3 {
        return None;
    }

    // -ies / -ied -> y (flies -> fly, deified -> deify); needs a stem of
    // at least two characters so "ties" falls through to the -s rule.
    for suffix in [&b"ies"[..], &b"ied"[..]] {
        if word.ends_with(suffix) && n >= 5 {
            let mut stem = word[..n - 3].to_vec();
            stem.push(b'y');
            return Some(stem);
        }
    }

    // -eed -> -ee when the part before it carries a vowel (agreed ->
    // agree) but not for monosyllables like "feed".
    if word.ends_with(b"eed") && has_vowel(&word[..n - 3]) {
        return Some(word[..n - 1].to_vec());
    }

    // Verbal -ed / -ing with doubled-consonant and silent-e restoration.
    if word.ends_with(b"ing") && n >= 6 && has_vowel(&word[..n - 3]) {
        return Some(restore_stem(word[..n - 3].to_vec()));
    }
    if word.ends_with(b"ed") && !word.ends_with(b"eed") && n >= 5 && has_vowel(&word[..n - 2]) {
        return Some(restore_stem(word[..n - 2].to_vec()));
    }

    // Plural forms.
    if word.ends_with(b"sses") {
        return Some(word[..n - 2].to_vec());
    }
    if word.ends_with(b"oes") && n >= 5 {
        return Some(word[..n - 2].to_vec());
    }
    if n >= 4 {
        for suffix in [&b"xes"[..], &b"zes"[..], &b"ches"[..], &b"shes"[..]] {
            if word.ends_with(suffix) {
                return Some(word[..n - 2].to_vec());
            }
        }
    }
    if word.ends_with(b"s")
        && !word.ends_with(b"ss")
        && !word.ends_with(b"us")
        && !word.ends_with(b"is")
        && !word.ends_with(b"as")
        && !word.ends_with(b"os")
        && n >= 3
    {
        return Some(word[..n - 1].to_vec());
    }

    None
}

/// Reduce a lowercase token to a lemma via a fixed suffix-stripping rule
/// table: plural -s/-es, -ies -> y, verbal -ed/-ing with doubled-consonant
/// and silent-e restoration; -ly is untouched. Rules are applied to a fixed
/// point, which makes the function idempotent by construction. Tokens
/// containing any non-ASCII-alphabetic character are returned unchanged.
pub fn lemmatize(token: &str) -> String {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_lowercase()) {
        return String::from(token);
    }
    let mut word = token.as_bytes().to_vec();
    while let Some(stripped) = strip_once(&word) {
        debug_assert!(stripped.len() < word.len());
        word = stripped;
    }
    // Rules only ever rearrange ASCII letters.
    String::from_utf8(word).expect("lemma is ascii")
}

/// Parse a stop-word list: one lowercase word per line, `#` comments and
/// blank lines ignored.
pub fn parse_stopwords(source: &str) -> BTreeSet<String> {
    source
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

/// The bundled 179-word English stop-word list.
pub fn default_stopwords() -> BTreeSet<String> {
    parse_stopwords(STOPWORDS_EN)
}

/// The tf-idf preprocessing chain: lemmatized tokens with stop words
/// removed, then tokens containing any non-alphabetic character removed,
/// then tokens shorter than 3 characters removed.
pub fn filter_tokens(tdoc: &TokenizedDoc, stopwords: &BTreeSet<String>) -> Vec<String> {
    tdoc.lemmas
        .iter()
        .filter(|lemma| !stopwords.contains(lemma.as_str()))
        .filter(|lemma| lemma.chars().all(char::is_alphabetic))
        .filter(|lemma| lemma.chars().count() >= 3)
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn doc(text: &str) -> Document {
        Document::new("d", text)
    }

    #[test]
    fn tokenize_basic_sentence() {
        assert_eq!(tokenize(&doc("They deceive us.")).tokens, ["they", "deceive", "us"]);
    }

    #[test]
    fn tokenize_empty_text() {
        let t = tokenize(&doc(""));
        assert!(t.tokens.is_empty());
        assert!(t.lemmas.is_empty());
    }

    #[test]
    fn tokenize_longer_sentence() {
        // Hand-applied segmentation rule.
        assert_eq!(
            tokenize(&doc("Wage slavery is indeed disgusting.")).tokens,
            ["wage", "slavery", "is", "indeed", "disgusting"]
        );
    }

    #[test]
    fn tokenize_keeps_apostrophes_and_hyphens() {
        let t = tokenize(&doc("The cat's warm-hearted friend, 3rd in line!"));
        assert_eq!(t.tokens, ["the", "cat's", "warm-hearted", "friend", "3rd", "in", "line"]);
    }

    #[test]
    fn tokenize_drops_alnum_free_runs() {
        assert_eq!(tokenize(&doc("a -- b '' c")).tokens, ["a", "b", "c"]);
    }

    #[test]
    fn tokenize_lowercases_unicode() {
        assert_eq!(tokenize(&doc("Äpfel UND Birnen")).tokens, ["äpfel", "und", "birnen"]);
    }

    #[test]
    fn lemma_examples_from_inflection_rules() {
        assert_eq!(lemmatize("desecrates"), "desecrate");
        assert_eq!(lemmatize("deify"), "deify");
        assert_eq!(lemmatize("deified"), "deify");
    }

    #[test]
    fn lemma_rule_table_spot_checks() {
        assert_eq!(lemmatize("running"), "run");
        assert_eq!(lemmatize("making"), "make");
        assert_eq!(lemmatize("venerated"), "venerate");
        assert_eq!(lemmatize("venerating"), "venerate");
        assert_eq!(lemmatize("flies"), "fly");
        assert_eq!(lemmatize("classes"), "class");
        assert_eq!(lemmatize("falling"), "fall");
        assert_eq!(lemmatize("boxes"), "box");
        assert_eq!(lemmatize("churches"), "church");
        assert_eq!(lemmatize("agreed"), "agree");
        assert_eq!(lemmatize("heroes"), "hero");
        assert_eq!(lemmatize("caring"), "care");
        // -ly untouched; short and sibilant-final words untouched.
        assert_eq!(lemmatize("slowly"), "slowly");
        assert_eq!(lemmatize("chaos"), "chaos");
        assert_eq!(lemmatize("fairness"), "fairness");
        assert_eq!(lemmatize("us"), "us");
        assert_eq!(lemmatize("sing"), "sing");
    }

    #[test]
    fn lemma_leaves_non_alphabetic_tokens_alone() {
        assert_eq!(lemmatize("cat's"), "cat's");
        assert_eq!(lemmatize("3rd"), "3rd");
        assert_eq!(lemmatize("warm-hearted"), "warm-hearted");
    }

    #[test]
    fn filter_chain_order() {
        let tdoc = TokenizedDoc {
            doc_id: String::from("d"),
            tokens: vec!["the".into(), "cat's".into(), "3rd".into(), "cooperate".into()],
            lemmas: vec!["the".into(), "cat's".into(), "3rd".into(), "cooperate".into()],
        };
        let stop: BTreeSet<String> = [String::from("the")].into_iter().collect();
        assert_eq!(filter_tokens(&tdoc, &stop), ["cooperate"]);
    }

    #[test]
    fn filter_empty_and_singleton() {
        let empty = TokenizedDoc {
            doc_id: String::from("d"),
            tokens: vec![],
            lemmas: vec![],
        };
        let stop: BTreeSet<String> = [String::from("an")].into_iter().collect();
        assert!(filter_tokens(&empty, &stop).is_empty());

        let tdoc = tokenize(&doc("an apple"));
        assert_eq!(filter_tokens(&tdoc, &stop), ["apple"]);
    }

    #[test]
    fn default_stopword_list_has_179_words() {
        assert_eq!(default_stopwords().len(), 179);
        assert!(default_stopwords().contains("the"));
        assert!(default_stopwords().contains("wouldn't"));
    }

    proptest! {
        #[test]
        fn lemmatize_is_idempotent(token in "[a-z]{1,12}") {
            let once = lemmatize(&token);
            prop_assert_eq!(lemmatize(&once), once.clone());
        }

        #[test]
        fn tokenize_output_is_lowercase_and_nonempty(text in "\\PC{0,80}") {
            let t = tokenize(&doc(&text));
            prop_assert_eq!(t.tokens.len(), t.lemmas.len());
            for (tok, lem) in t.pairs() {
                prop_assert!(!tok.is_empty());
                prop_assert!(!lem.is_empty());
                // Lowercasing is a fixed point of the output (some Unicode
                // letters are uppercase-only and stay as they are).
                prop_assert_eq!(tok.to_lowercase(), tok);
            }
        }

        #[test]
        fn filtered_tokens_are_alphabetic_and_long(text in "\\PC{0,80}") {
            let t = tokenize(&doc(&text));
            for tok in filter_tokens(&t, &default_stopwords()) {
                prop_assert!(tok.chars().all(char::is_alphabetic));
                prop_assert!(tok.chars().count() >= 3);
            }
        }

        #[test]
        fn tokenize_is_deterministic(text in "\\PC{0,60}") {
            prop_assert_eq!(tokenize(&doc(&text)), tokenize(&doc(&text)));
        }
    }
}
