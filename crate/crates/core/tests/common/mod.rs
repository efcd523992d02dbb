//! Brute-force reference evaluator: statistics come from a dense
//! term-by-document count matrix built from raw tokens, and every document is
//! scored directly from the closed-form weights.

#![allow(dead_code)]

use std::collections::BTreeMap;

use arir::index::RawDocument;
use arir::ranking::Query;
use arir::textpipe::tokenize;
use rand::seq::SliceRandom;
use rand::Rng;

pub struct Matrix {
    pub docnos: Vec<String>,
    pub vocab: Vec<String>,
    /// counts[doc][term]
    pub counts: Vec<Vec<u64>>,
    column: BTreeMap<String, usize>,
    dfs: Vec<u64>,
    ctfs: Vec<u64>,
    dls: Vec<u64>,
}

impl Matrix {
    /// Whitespace/punctuation split with the stopwords in `stop` dropped.
    /// The generated corpora use plain ASCII words so no folding is needed.
    pub fn from_docs(docs: &[RawDocument], stop: &[&str]) -> Self {
        let mut vocab: Vec<String> = Vec::new();
        let mut rows: Vec<BTreeMap<String, u64>> = Vec::new();
        for d in docs {
            let mut row = BTreeMap::new();
            for tok in d
                .text
                .split(|c: char| !c.is_ascii_alphanumeric())
                .filter(|t| !t.is_empty())
            {
                if stop.contains(&tok) {
                    continue;
                }
                *row.entry(tok.to_owned()).or_insert(0) += 1;
                if !vocab.iter().any(|v| v == tok) {
                    vocab.push(tok.to_owned());
                }
            }
            rows.push(row);
        }
        vocab.sort();
        let counts: Vec<Vec<u64>> = rows
            .iter()
            .map(|row| vocab.iter().map(|t| row.get(t).copied().unwrap_or(0)).collect())
            .collect();
        // column sums, computed once from the dense matrix
        let dfs = (0..vocab.len())
            .map(|j| counts.iter().filter(|r| r[j] > 0).count() as u64)
            .collect();
        let ctfs = (0..vocab.len()).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        let dls = counts.iter().map(|r| r.iter().sum()).collect();
        Self {
            docnos: docs.iter().map(|d| d.docno.clone()).collect(),
            column: vocab.iter().enumerate().map(|(j, t)| (t.clone(), j)).collect(),
            vocab,
            counts,
            dfs,
            ctfs,
            dls,
        }
    }

    pub fn n(&self) -> usize {
        self.docnos.len()
    }

    fn col(&self, term: &str) -> Option<usize> {
        self.column.get(term).copied()
    }

    pub fn tf(&self, d: usize, term: &str) -> u64 {
        self.col(term).map_or(0, |j| self.counts[d][j])
    }

    pub fn dl(&self, d: usize) -> u64 {
        self.dls[d]
    }

    pub fn df(&self, term: &str) -> u64 {
        self.col(term).map_or(0, |j| self.dfs[j])
    }

    pub fn ctf(&self, term: &str) -> u64 {
        self.col(term).map_or(0, |j| self.ctfs[j])
    }

    pub fn total(&self) -> u64 {
        self.dls.iter().sum()
    }

    fn avgdl(&self) -> f64 {
        self.total() as f64 / self.n() as f64
    }

    fn matching(&self, d: usize, q: &Query) -> bool {
        q.terms().any(|(t, _)| self.tf(d, t) > 0)
    }

    pub fn bm25(&self, q: &Query, k1: f64, b: f64, k3: f64) -> Vec<(String, f64)> {
        let n = self.n() as f64;
        let avgdl = self.avgdl();
        let mut out = Vec::new();
        for d in 0..self.n() {
            if !self.matching(d, q) {
                continue;
            }
            let mut s = 0.0;
            for (t, qtf) in q.terms() {
                let tf = self.tf(d, t) as f64;
                if tf == 0.0 {
                    continue;
                }
                let df = self.df(t) as f64;
                let idf = ((n - df + 0.5) / (df + 0.5)).ln();
                let qtf = f64::from(qtf);
                let big_k = k1 * ((1.0 - b) + b * (self.dl(d) as f64 / avgdl));
                s += idf * ((k1 + 1.0) * tf / (big_k + tf)) * ((k3 + 1.0) * qtf / (k3 + qtf));
            }
            out.push((self.docnos[d].clone(), s));
        }
        sort_run(out)
    }

    pub fn tfidf(&self, q: &Query, k1: f64, b: f64) -> Vec<(String, f64)> {
        let n = self.n() as f64;
        let avgdl = self.avgdl();
        let mut out = Vec::new();
        for d in 0..self.n() {
            if !self.matching(d, q) {
                continue;
            }
            let mut s = 0.0;
            for (t, qtf) in q.terms() {
                let tf = self.tf(d, t) as f64;
                if tf == 0.0 {
                    continue;
                }
                let idf = (n / self.df(t) as f64).ln();
                let norm = k1 * ((1.0 - b) + b * (self.dl(d) as f64 / avgdl));
                s += (k1 * tf / (tf + norm) * idf) * (f64::from(qtf) * idf);
            }
            out.push((self.docnos[d].clone(), s));
        }
        sort_run(out)
    }

    /// Rank-equivalent form, every document scored.
    pub fn kl(&self, q: &Query, mu: f64) -> Vec<(String, f64)> {
        let total = self.total() as f64;
        let terms: Vec<(&str, u32)> = q.terms().filter(|(t, _)| self.ctf(t) > 0).collect();
        if terms.is_empty() {
            return Vec::new();
        }
        let qlen: u32 = terms.iter().map(|(_, q)| q).sum();
        let mut out = Vec::new();
        for d in 0..self.n() {
            let mut s = 0.0;
            for &(t, qtf) in &terms {
                let tf = self.tf(d, t) as f64;
                if tf > 0.0 {
                    s += f64::from(qtf) * (1.0 + tf / (mu * (self.ctf(t) as f64 / total))).ln();
                }
            }
            s += f64::from(qlen) * (mu / (mu + self.dl(d) as f64)).ln();
            out.push((self.docnos[d].clone(), s));
        }
        sort_run(out)
    }

    /// Full smoothed query log-likelihood `Σ qtf · ln((tf + mu·p(t|C)) / (dl + mu))`.
    pub fn query_likelihood(&self, q: &Query, mu: f64) -> Vec<(String, f64)> {
        let total = self.total() as f64;
        let terms: Vec<(&str, u32)> = q.terms().filter(|(t, _)| self.ctf(t) > 0).collect();
        if terms.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for d in 0..self.n() {
            let dl = self.dl(d) as f64;
            let ll: f64 = terms
                .iter()
                .map(|&(t, qtf)| {
                    let p = (self.tf(d, t) as f64 + mu * self.ctf(t) as f64 / total) / (dl + mu);
                    f64::from(qtf) * p.ln()
                })
                .sum();
            out.push((self.docnos[d].clone(), ll));
        }
        sort_run(out)
    }
}

/// Score descending, then docno ascending.
pub fn sort_run(mut v: Vec<(String, f64)>) -> Vec<(String, f64)> {
    v.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    v
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// A random corpus of ASCII words `w0..w{vocab}` with Zipf-ish frequencies and
/// shuffled document numbers, plus random queries over the same vocabulary
/// (including a few words that never occur).
pub struct RandomCase {
    pub docs: Vec<RawDocument>,
    pub queries: Vec<Query>,
    pub stopwords: Vec<String>,
}

pub fn random_case<R: Rng>(rng: &mut R) -> RandomCase {
    let n_docs = rng.gen_range(1..=200);
    let vocab = rng.gen_range(2..=50);
    let word = |i: usize| format!("w{i}");
    let mut ids: Vec<usize> = (0..n_docs).collect();
    ids.shuffle(rng);
    let docs = ids
        .into_iter()
        .map(|id| {
            let len = rng.gen_range(0..=40);
            let text: Vec<String> = (0..len)
                .map(|_| {
                    // squaring skews toward low indices
                    let u: f64 = rng.gen();
                    word((u * u * vocab as f64) as usize)
                })
                .collect();
            RawDocument::new(format!("DOC{id:04}"), text.join(" "))
        })
        .collect();
    let queries = (0..5)
        .map(|qi| {
            let len = rng.gen_range(1..=6);
            let terms: Vec<String> = (0..len).map(|_| word(rng.gen_range(0..vocab + 3))).collect();
            Query::from_terms(qi.to_string(), terms)
        })
        .collect();
    let stopwords = if rng.gen_bool(0.5) {
        (0..rng.gen_range(1..=3))
            .map(|_| word(rng.gen_range(0..vocab)))
            .collect()
    } else {
        Vec::new()
    };
    RandomCase {
        docs,
        queries,
        stopwords,
    }
}

/// Oracle and engine orderings must agree. Adjacent engine entries may only
/// appear in an order the oracle contradicts when the oracle scores are equal
/// to within `tol` relative, and engine-equal scores must be in docno order.
pub fn order_consistent(engine: &[(String, f64)], oracle: &[(String, f64)], tol: f64) -> Result<(), String> {
    if engine.len() != oracle.len() {
        return Err(format!("lengths differ: {} vs {}", engine.len(), oracle.len()));
    }
    let oracle_score: BTreeMap<&str, f64> = oracle.iter().map(|(d, s)| (d.as_str(), *s)).collect();
    for w in engine.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let (oa, ob) = match (oracle_score.get(a.0.as_str()), oracle_score.get(b.0.as_str())) {
            (Some(x), Some(y)) => (*x, *y),
            _ => return Err(format!("document {} or {} unknown to oracle", a.0, b.0)),
        };
        if ob > oa && !rel_close(oa, ob, tol) {
            return Err(format!("{} ({oa}) ranked above {} ({ob})", a.0, b.0));
        }
        if a.1 == b.1 && a.0 > b.0 {
            return Err(format!("tie between {} and {} not in docno order", a.0, b.0));
        }
    }
    Ok(())
}

/// Tokens of `text` as the engine sees them, without a stoplist.
pub fn raw_tokens(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.into_string()).collect()
}
