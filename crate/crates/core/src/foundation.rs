//! The five-way moral-foundation axis and per-document score vectors.

use alloc::string::String;
use core::fmt;

/// One of the five moral foundations, in canonical (alphabetical) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Foundation {
    Authority,
    Care,
    Fairness,
    Loyalty,
    Sanctity,
}

impl Foundation {
    /// All five foundations in canonical order.
    pub const ALL: [Foundation; 5] = [
        Foundation::Authority,
        Foundation::Care,
        Foundation::Fairness,
        Foundation::Loyalty,
        Foundation::Sanctity,
    ];

    pub const COUNT: usize = 5;

    /// Canonical index, 0..5.
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Foundation> {
        Foundation::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Foundation::Authority => "authority",
            Foundation::Care => "care",
            Foundation::Fairness => "fairness",
            Foundation::Loyalty => "loyalty",
            Foundation::Sanctity => "sanctity",
        }
    }

    /// Parse a lowercase foundation name.
    pub fn parse(name: &str) -> Option<Foundation> {
        match name {
            "authority" => Some(Foundation::Authority),
            "care" => Some(Foundation::Care),
            "fairness" => Some(Foundation::Fairness),
            "loyalty" => Some(Foundation::Loyalty),
            "sanctity" => Some(Foundation::Sanctity),
            _ => None,
        }
    }
}

impl fmt::Display for Foundation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A set of foundations packed into one byte. Lexicon entries map a word to
/// one or more foundations; the bitset keeps per-token matching cheap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct FoundationSet(u8);

impl FoundationSet {
    pub const EMPTY: FoundationSet = FoundationSet(0);

    pub fn singleton(f: Foundation) -> FoundationSet {
        FoundationSet(1 << f.index())
    }

    pub fn insert(&mut self, f: Foundation) {
        self.0 |= 1 << f.index();
    }

    pub fn contains(self, f: Foundation) -> bool {
        self.0 & (1 << f.index()) != 0
    }

    pub fn union(self, other: FoundationSet) -> FoundationSet {
        FoundationSet(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Foundation> {
        Foundation::ALL.into_iter().filter(move |f| self.contains(*f))
    }
}

impl FromIterator<Foundation> for FoundationSet {
    fn from_iter<I: IntoIterator<Item = Foundation>>(iter: I) -> Self {
        let mut set = FoundationSet::EMPTY;
        for f in iter {
            set.insert(f);
        }
        set
    }
}

/// A per-document score vector over the five foundations.
///
/// Word-count scorers produce values in [0, 1]; embedding similarity
/// produces values in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FoundationScores {
    values: [f64; 5],
}

impl FoundationScores {
    pub fn zeros() -> FoundationScores {
        FoundationScores::default()
    }

    pub fn from_array(values: [f64; 5]) -> FoundationScores {
        FoundationScores { values }
    }

    #[inline]
    pub fn get(&self, f: Foundation) -> f64 {
        self.values[f.index()]
    }

    #[inline]
    pub fn set(&mut self, f: Foundation, value: f64) {
        self.values[f.index()] = value;
    }

    #[inline]
    pub fn add(&mut self, f: Foundation, delta: f64) {
        self.values[f.index()] += delta;
    }

    pub fn as_array(&self) -> [f64; 5] {
        self.values
    }

    /// `(foundation, score)` pairs in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (Foundation, f64)> + '_ {
        Foundation::ALL.into_iter().map(move |f| (f, self.get(f)))
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }

    pub fn divide(&mut self, divisor: f64) {
        for v in &mut self.values {
            *v /= divisor;
        }
    }
}

/// Per-document binary foundation labels with `None` marking a label that
/// the annotation schema never assigned (only the news schema produces
/// these; they are excluded from training and evaluation per foundation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FoundationLabels {
    values: [Option<bool>; 5],
}

impl FoundationLabels {
    pub fn all_zero() -> FoundationLabels {
        FoundationLabels {
            values: [Some(false); 5],
        }
    }

    pub fn all_missing() -> FoundationLabels {
        FoundationLabels { values: [None; 5] }
    }

    pub fn from_array(values: [Option<bool>; 5]) -> FoundationLabels {
        FoundationLabels { values }
    }

    #[inline]
    pub fn get(&self, f: Foundation) -> Option<bool> {
        self.values[f.index()]
    }

    #[inline]
    pub fn set(&mut self, f: Foundation, value: Option<bool>) {
        self.values[f.index()] = value;
    }

    pub fn as_array(&self) -> [Option<bool>; 5] {
        self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (Foundation, Option<bool>)> + '_ {
        Foundation::ALL.into_iter().map(move |f| (f, self.get(f)))
    }

    pub fn any_missing(&self) -> bool {
        self.values.iter().any(|v| v.is_none())
    }

    pub fn positive_count(&self) -> usize {
        self.values.iter().filter(|v| **v == Some(true)).count()
    }
}

/// Parse a `<foundation>.<virtue|vice>` category label, merging virtue and
/// vice into the base foundation. Returns `Ok(None)` for the excluded
/// "morality general" category; a bare foundation name is also accepted.
pub fn parse_category_label(label: &str) -> Result<Option<Foundation>, String> {
    let label = label.trim();
    if label.eq_ignore_ascii_case("morality.general") || label.eq_ignore_ascii_case("moralitygeneral") {
        return Ok(None);
    }
    let base = label.split('.').next().unwrap_or(label);
    match Foundation::parse(&base.to_ascii_lowercase()) {
        Some(f) => {
            // Validate the polarity suffix when present.
            if let Some(pol) = label.split('.').nth(1) {
                if !pol.eq_ignore_ascii_case("virtue") && !pol.eq_ignore_ascii_case("vice") {
                    return Err(String::from(label));
                }
            }
            Ok(Some(f))
        }
        None => Err(String::from(label)),
    }
}
