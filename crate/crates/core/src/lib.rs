//! Retrieval engine and experiment toolkit for stopword studies on Arabic text.
//!
//! The pipeline runs in this order:
//!
//! 1. [`textpipe`] folds orthographic variants and splits text into tokens.
//! 2. [`stoplists`] loads, builds and combines stopword lists.
//! 3. [`index`] parses TIPSTER SGML and builds an immutable inverted index.
//! 4. [`ranking`] scores queries with TF*IDF, Okapi BM25 or KL-divergence
//!    with Dirichlet smoothing.
//! 5. [`treceval`] computes TREC-style effectiveness measures.
//! 6. [`sigtest`] runs Friedman and Wilcoxon signed-rank tests over
//!    per-query scores.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`). The aliases at the
//! crate root fix the scalar to `f64`, which is what the command-line driver
//! uses; `*32` aliases are provided for the ranking types.

pub mod error;
pub mod index;
pub mod ranking;
pub mod real;
pub mod sigtest;
pub mod stoplists;
pub mod textpipe;
pub mod treceval;

pub use error::{Error, Result};
pub use index::{Analyzer, Encoding, Index};
pub use real::Real;
pub use stoplists::{Provenance, Stoplist, TermFrequencyTable};
pub use textpipe::{Normalizer, Token};

pub type Bm25Params = ranking::Bm25Params<f64>;
pub type TfIdfParams = ranking::TfIdfParams<f64>;
pub type DirichletParams = ranking::DirichletParams<f64>;
pub type Model = ranking::Model<f64>;
pub type RankedRun = ranking::RankedRun<f64>;
pub type RankedEntry = ranking::RankedEntry<f64>;

pub type Bm25Params32 = ranking::Bm25Params<f32>;
pub type TfIdfParams32 = ranking::TfIdfParams<f32>;
pub type DirichletParams32 = ranking::DirichletParams<f32>;
pub type Model32 = ranking::Model<f32>;
pub type RankedRun32 = ranking::RankedRun<f32>;

pub type QueryEval = treceval::QueryEval<f64>;
pub type EvalReport = treceval::EvalReport<f64>;

pub type ScoreMatrix = sigtest::ScoreMatrix<f64>;
pub type FriedmanResult = sigtest::FriedmanResult<f64>;
pub type WilcoxonResult = sigtest::WilcoxonResult<f64>;
