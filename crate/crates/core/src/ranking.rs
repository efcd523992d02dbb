//! TF*IDF, Okapi BM25 and KL-divergence (Dirichlet-smoothed query
//! likelihood) scoring over an [`Index`].
//!
//! All logarithms are natural. BM25 idf is `ln((N - df + 0.5) / (df + 0.5))`
//! and is deliberately not clamped: terms in more than half the documents get
//! a negative weight. Ties are broken by ascending document number so runs
//! are reproducible byte for byte.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index::{Analyzer, Index};
use crate::real::Real;

/// Conventional TREC run depth.
pub const DEFAULT_TOP_K: usize = 1000;

/// A bag of normalized query terms with their in-query frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub qid: String,
    terms: BTreeMap<String, u32>,
}

impl Query {
    pub fn from_terms<I, S>(qid: impl Into<String>, terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for t in terms {
            *map.entry(t.into()).or_insert(0) += 1;
        }
        Self {
            qid: qid.into(),
            terms: map,
        }
    }

    /// Runs `text` through the analyzer used to build the index.
    pub fn from_text(qid: impl Into<String>, text: &str, analyzer: &Analyzer) -> Self {
        Self::from_terms(qid, analyzer.analyze(text))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, u32)> {
        self.terms.iter().map(|(t, &q)| (t.as_str(), q))
    }

    pub fn qtf(&self, term: &str) -> u32 {
        self.terms.get(term).copied().unwrap_or(0)
    }

    /// Number of distinct terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Sum of query term frequencies.
    pub fn length(&self) -> u64 {
        self.terms.values().map(|&q| u64::from(q)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params<R> {
    pub k1: R,
    pub b: R,
    pub k3: R,
}

impl<R: Real> Default for Bm25Params<R> {
    fn default() -> Self {
        Self {
            k1: R::lit(1.2),
            b: R::lit(0.75),
            k3: R::lit(7.0),
        }
    }
}

impl<R: Real> Bm25Params<R> {
    // negated comparisons so NaN parameters are rejected
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(self.k1 >= R::zero()) || !(self.k3 >= R::zero()) {
            return Err(Error::Parameter("BM25 requires k1 >= 0 and k3 >= 0".into()));
        }
        if !(self.b >= R::zero() && self.b <= R::one()) {
            return Err(Error::Parameter("BM25 requires 0 <= b <= 1".into()));
        }
        Ok(())
    }
}

/// Document-side term weight borrows BM25's saturating tf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfIdfParams<R> {
    pub k1: R,
    pub b: R,
}

impl<R: Real> Default for TfIdfParams<R> {
    fn default() -> Self {
        Self {
            k1: R::one(),
            b: R::lit(0.3),
        }
    }
}

impl<R: Real> TfIdfParams<R> {
    // negated comparisons so NaN parameters are rejected
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(self.k1 >= R::zero()) || !(self.b >= R::zero() && self.b <= R::one()) {
            return Err(Error::Parameter("TF*IDF requires k1 >= 0 and 0 <= b <= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletParams<R> {
    pub mu: R,
}

impl<R: Real> Default for DirichletParams<R> {
    fn default() -> Self {
        Self { mu: R::lit(2000.0) }
    }
}

impl<R: Real> DirichletParams<R> {
    // negated comparisons so NaN parameters are rejected
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > R::zero()) || !self.mu.is_finite() {
            return Err(Error::Parameter("Dirichlet prior mu must be > 0".into()));
        }
        Ok(())
    }
}

/// A weighting scheme with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model<R> {
    TfIdf(TfIdfParams<R>),
    Bm25(Bm25Params<R>),
    Kl(DirichletParams<R>),
}

impl<R: Real> Model<R> {
    /// Parses `TFIDF`, `BM25` or `KL` into the model with default parameters.
    pub fn from_code(code: &str) -> Result<Self> {
        match code {
            "TFIDF" => Ok(Model::TfIdf(TfIdfParams::default())),
            "BM25" => Ok(Model::Bm25(Bm25Params::default())),
            "KL" => Ok(Model::Kl(DirichletParams::default())),
            other => Err(Error::Parameter(format!(
                "unknown model `{other}` (expected TFIDF, BM25 or KL)"
            ))),
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Model::TfIdf(_) => "TFIDF",
            Model::Bm25(_) => "BM25",
            Model::Kl(_) => "KL",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Model::TfIdf(p) => p.validate(),
            Model::Bm25(p) => p.validate(),
            Model::Kl(p) => p.validate(),
        }
    }
}

/// `<MODEL>` or `<MODEL>_<LIST>`.
pub fn run_tag(model_code: &str, stoplist: Option<&str>) -> String {
    match stoplist {
        Some(list) => format!("{model_code}_{list}"),
        None => model_code.to_owned(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry<R> {
    pub docno: String,
    pub score: R,
    /// 1-based.
    pub rank: u32,
}

/// Ranked documents for one query. Scores are non-increasing, ties ordered by
/// document number, ranks consecutive from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedRun<R> {
    pub qid: String,
    pub tag: String,
    pub entries: Vec<RankedEntry<R>>,
}

impl<R> RankedRun<R> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn docnos(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.docno.as_str())
    }
}

impl<R: fmt::Display> fmt::Display for RankedRun<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{} Q0 {} {} {:.6} {}", self.qid, e.docno, e.rank, e.score, self.tag)?;
        }
        Ok(())
    }
}

fn tag_for(index: &Index, code: &str) -> String {
    run_tag(code, index.stoplist().map(|l| l.name()))
}

fn check_top_k(top_k: usize) -> Result<()> {
    if top_k == 0 {
        return Err(Error::Parameter("top_k must be at least 1".into()));
    }
    Ok(())
}

/// Candidate documents with accumulated scores.
struct Candidates<R> {
    scores: Vec<R>,
    member: Vec<bool>,
    list: Vec<u32>,
}

impl<R: Real> Candidates<R> {
    fn new(n: usize) -> Self {
        Self {
            scores: vec![R::zero(); n],
            member: vec![false; n],
            list: Vec::new(),
        }
    }

    #[inline]
    fn add(&mut self, doc: u32, v: R) {
        let i = doc as usize;
        if !self.member[i] {
            self.member[i] = true;
            self.list.push(doc);
        }
        self.scores[i] = self.scores[i] + v;
    }

    fn into_pairs(self) -> Vec<(u32, R)> {
        let scores = self.scores;
        self.list.into_iter().map(|d| (d, scores[d as usize])).collect()
    }
}

fn finish<R: Real>(index: &Index, qid: &str, tag: String, mut cands: Vec<(u32, R)>, top_k: usize) -> RankedRun<R> {
    let cmp = |a: &(u32, R), b: &(u32, R)| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| index.docno(a.0).cmp(index.docno(b.0)))
    };
    if cands.len() > top_k {
        cands.select_nth_unstable_by(top_k - 1, cmp);
        cands.truncate(top_k);
    }
    cands.sort_unstable_by(cmp);
    let entries = cands
        .into_iter()
        .enumerate()
        .map(|(i, (doc, score))| RankedEntry {
            docno: index.docno(doc).to_owned(),
            score,
            rank: i as u32 + 1,
        })
        .collect();
    RankedRun {
        qid: qid.to_owned(),
        tag,
        entries,
    }
}

#[inline]
fn length_ratio<R: Real>(index: &Index, doc: u32, avgdl: R) -> R {
    R::from_count(u64::from(index.doc_len(doc))) / avgdl
}

fn collection_avgdl<R: Real>(index: &Index) -> R {
    R::from_count(index.total_tokens()) / R::from_count(index.num_docs() as u64)
}

/// Okapi BM25 with query-term saturation.
///
/// `score(d) = Σ idf(t) · (k1+1)·tf / (K + tf) · (k3+1)·qtf / (k3 + qtf)`,
/// `K = k1·((1-b) + b·dl/avgdl)`. Only documents containing a query term are
/// candidates.
pub fn score_bm25<R: Real>(index: &Index, query: &Query, p: &Bm25Params<R>, top_k: usize) -> Result<RankedRun<R>> {
    p.validate()?;
    check_top_k(top_k)?;
    let tag = tag_for(index, "BM25");
    let n = R::from_count(index.num_docs() as u64);
    let half = R::lit(0.5);
    let one = R::one();
    let avgdl = collection_avgdl::<R>(index);
    let mut acc = Candidates::new(index.num_docs());
    for (term, qtf) in query.terms() {
        let Some(entry) = index.term(term) else { continue };
        let df = R::from_count(entry.df() as u64);
        let idf = ((n - df + half) / (df + half)).ln();
        let qtf = R::from_count(u64::from(qtf));
        let query_part = (p.k3 + one) * qtf / (p.k3 + qtf);
        for posting in &entry.postings {
            let tf = R::from_count(u64::from(posting.tf));
            let k = p.k1 * ((one - p.b) + p.b * length_ratio(index, posting.doc, avgdl));
            let doc_part = (p.k1 + one) * tf / (k + tf);
            acc.add(posting.doc, idf * doc_part * query_part);
        }
    }
    Ok(finish(index, &query.qid, tag, acc.into_pairs(), top_k))
}

/// TF*IDF with BM25-style saturating tf on the document side.
///
/// `score(d) = Σ [k1·tf / (tf + k1·((1-b) + b·dl/avgdl)) · idf(t)] · [qtf · idf(t)]`,
/// `idf(t) = ln(N / df)`.
pub fn score_tfidf<R: Real>(index: &Index, query: &Query, p: &TfIdfParams<R>, top_k: usize) -> Result<RankedRun<R>> {
    p.validate()?;
    check_top_k(top_k)?;
    let tag = tag_for(index, "TFIDF");
    let n = R::from_count(index.num_docs() as u64);
    let one = R::one();
    let avgdl = collection_avgdl::<R>(index);
    let mut acc = Candidates::new(index.num_docs());
    for (term, qtf) in query.terms() {
        let Some(entry) = index.term(term) else { continue };
        let idf = (n / R::from_count(entry.df() as u64)).ln();
        let query_weight = R::from_count(u64::from(qtf)) * idf;
        for posting in &entry.postings {
            let tf = R::from_count(u64::from(posting.tf));
            let norm = p.k1 * ((one - p.b) + p.b * length_ratio(index, posting.doc, avgdl));
            let doc_weight = p.k1 * tf / (tf + norm) * idf;
            acc.add(posting.doc, doc_weight * query_weight);
        }
    }
    Ok(finish(index, &query.qid, tag, acc.into_pairs(), top_k))
}

/// Rank-equivalent Dirichlet-smoothed query likelihood:
///
/// `score(d) = Σ qtf · ln(1 + tf / (mu · p(t|C))) + |q| · ln(mu / (mu + dl))`
///
/// with `p(t|C) = ctf / total_tokens`. Every document is a candidate because
/// the length term differs even when no query term matches. Query terms
/// absent from the collection are dropped.
pub fn score_kl_dirichlet<R: Real>(
    index: &Index,
    query: &Query,
    p: &DirichletParams<R>,
    top_k: usize,
) -> Result<RankedRun<R>> {
    p.validate()?;
    check_top_k(top_k)?;
    let tag = tag_for(index, "KL");
    let total = R::from_count(index.total_tokens());
    let one = R::one();
    let mut scores = vec![R::zero(); index.num_docs()];
    let mut query_len = 0u64;
    for (term, qtf) in query.terms() {
        let entry = match index.term(term) {
            Some(e) if e.ctf > 0 => e,
            _ => {
                log::warn!("query {}: term `{term}` not in collection, dropped", query.qid);
                continue;
            }
        };
        query_len += u64::from(qtf);
        let background = p.mu * (R::from_count(entry.ctf) / total);
        let qtf = R::from_count(u64::from(qtf));
        for posting in &entry.postings {
            let tf = R::from_count(u64::from(posting.tf));
            let slot = &mut scores[posting.doc as usize];
            *slot = *slot + qtf * (one + tf / background).ln();
        }
    }
    if query_len == 0 {
        return Ok(RankedRun {
            qid: query.qid.clone(),
            tag,
            entries: Vec::new(),
        });
    }
    let qlen = R::from_count(query_len);
    let cands = scores
        .into_iter()
        .enumerate()
        .map(|(d, s)| {
            let dl = R::from_count(u64::from(index.doc_len(d as u32)));
            (d as u32, s + qlen * (p.mu / (p.mu + dl)).ln())
        })
        .collect();
    Ok(finish(index, &query.qid, tag, cands, top_k))
}

/// Scores one query with any model.
pub fn rank<R: Real>(index: &Index, query: &Query, model: &Model<R>, top_k: usize) -> Result<RankedRun<R>> {
    match model {
        Model::TfIdf(p) => score_tfidf(index, query, p, top_k),
        Model::Bm25(p) => score_bm25(index, query, p, top_k),
        Model::Kl(p) => score_kl_dirichlet(index, query, p, top_k),
    }
}

/// Scores queries in parallel; output order follows `queries`.
pub fn rank_all<R: Real>(
    index: &Index,
    queries: &[Query],
    model: &Model<R>,
    top_k: usize,
) -> Result<Vec<RankedRun<R>>> {
    model.validate()?;
    check_top_k(top_k)?;
    queries.par_iter().map(|q| rank(index, q, model, top_k)).collect()
}
