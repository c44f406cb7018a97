//! Core algorithms for scoring, evaluating, and statistically analyzing
//! moral-foundation signals in text.
//!
//! The crate is `no_std` + `alloc` so the algorithmic layer stays free of
//! any platform dependency: tokenization, the three dictionary scorers,
//! embedding-similarity scoring, tf-idf plus linear classifiers, dataset
//! aggregation and splitting, rank-based evaluation, and contingency-table
//! statistics. All randomness flows through the seeded generator in
//! [`rng`], so every operation is bit-reproducible across runs and
//! platforms. File access, serialization, and the command-line surface
//! live in the companion `mftk` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod dataset;
pub mod ddr;
pub mod eval;
pub mod foundation;
pub mod lexicon;
pub mod linear;
pub mod math;
pub mod rng;
pub mod stats;
pub mod text;
pub mod tfidf;

pub use foundation::{Foundation, FoundationScores};
pub use text::{Document, TokenizedDoc};
