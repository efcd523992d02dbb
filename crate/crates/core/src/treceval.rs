//! TREC-style effectiveness measures: non-interpolated average precision,
//! 11-point interpolated precision, precision at fixed cutoffs and
//! R-precision (the "exact breakeven" precision).
//!
//! Recall denominators come from the relevance judgments. Queries without any
//! relevant document are reported but left out of every mean.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::ranking::RankedRun;
use crate::real::Real;

/// Document cutoff levels for precision, as in trec_eval.
pub const CUTOFFS: [usize; 9] = [5, 10, 15, 20, 30, 100, 200, 500, 1000];

/// Recall levels 0.0, 0.1, ..., 1.0.
pub const RECALL_LEVELS: usize = 11;

/// Binary relevance judgments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeSet<String>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a judgment; only `relevant` ones enter the set, but the query
    /// becomes known either way.
    pub fn insert(&mut self, qid: impl Into<String>, docno: impl Into<String>, relevant: bool) {
        let set = self.judgments.entry(qid.into()).or_default();
        if relevant {
            set.insert(docno.into());
        }
    }

    pub fn relevant(&self, qid: &str) -> Option<&BTreeSet<String>> {
        self.judgments.get(qid)
    }

    pub fn qids(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    pub fn num_queries(&self) -> usize {
        self.judgments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }
}

/// Parses `qid iter docno rel` lines. Graded relevance collapses to binary
/// (`rel > 0`). Blank lines are skipped.
pub fn parse_qrels<R: BufRead>(stream: R) -> Result<Qrels> {
    let mut qrels = Qrels::new();
    for (i, line) in stream.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::Utf8 { line: line_no },
            _ => Error::Io(e),
        })?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 4 {
            return Err(Error::parse(
                line_no,
                format!("expected `qid iter docno rel`, found {} fields", fields.len()),
            ));
        }
        let rel: i64 = fields[3]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("relevance `{}` is not an integer", fields[3])))?;
        qrels.insert(fields[0], fields[2], rel > 0);
    }
    Ok(qrels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryEval<R> {
    pub qid: String,
    pub num_relevant: usize,
    pub num_retrieved: usize,
    pub num_relevant_retrieved: usize,
    pub average_precision: R,
    /// Interpolated precision at recall 0.0, 0.1, ..., 1.0.
    pub interp_precision: [R; RECALL_LEVELS],
    /// Precision at each of [`CUTOFFS`].
    pub cutoff_precision: [R; CUTOFFS.len()],
    pub r_precision: R,
}

impl<R: Real> QueryEval<R> {
    /// True when the query has no relevant documents and is left out of means.
    pub fn excluded(&self) -> bool {
        self.num_relevant == 0
    }

    pub fn precision_at(&self, cutoff: usize) -> Option<R> {
        CUTOFFS
            .iter()
            .position(|&c| c == cutoff)
            .map(|i| self.cutoff_precision[i])
    }
}

/// Evaluates a ranked list of document numbers against the relevant set.
///
/// With no relevant documents every measure is zero and the result is
/// flagged through [`QueryEval::excluded`].
pub fn evaluate_ranking<'a, R, I>(qid: &str, ranking: I, relevant: &BTreeSet<String>) -> QueryEval<R>
where
    R: Real,
    I: IntoIterator<Item = &'a str>,
{
    let big_r = relevant.len();
    // relevant-so-far count at each rank, 1-based
    let mut hits_at: Vec<usize> = Vec::new();
    let mut seen = HashSet::new();
    let mut hits = 0usize;
    let mut ap_sum = R::zero();
    for docno in ranking {
        let rank = hits_at.len() + 1;
        if relevant.contains(docno) && seen.insert(docno) {
            hits += 1;
            ap_sum = ap_sum + R::from_count(hits as u64) / R::from_count(rank as u64);
        }
        hits_at.push(hits);
    }
    let retrieved = hits_at.len();

    let zero = R::zero();
    let mut eval = QueryEval {
        qid: qid.to_owned(),
        num_relevant: big_r,
        num_retrieved: retrieved,
        num_relevant_retrieved: hits,
        average_precision: zero,
        interp_precision: [zero; RECALL_LEVELS],
        cutoff_precision: [zero; CUTOFFS.len()],
        r_precision: zero,
    };
    if big_r == 0 {
        return eval;
    }

    let r_of = |n: usize| R::from_count(n as u64);
    eval.average_precision = ap_sum / r_of(big_r);

    // Running max of precision from the bottom gives interpolated precision.
    // A level x is reached at rank k when hits_at[k] / R >= x, i.e.
    // 10 * hits >= level * R in integer arithmetic.
    let mut best_from = vec![zero; retrieved + 1];
    for k in (0..retrieved).rev() {
        let p = r_of(hits_at[k]) / r_of(k + 1);
        best_from[k] = if p > best_from[k + 1] { p } else { best_from[k + 1] };
    }
    for (level, slot) in eval.interp_precision.iter_mut().enumerate() {
        let first = hits_at.iter().position(|&h| 10 * h >= level * big_r);
        *slot = first.map_or(zero, |k| best_from[k]);
    }

    let hits_within = |n: usize| if n == 0 { 0 } else { hits_at[n.min(retrieved) - 1] };
    for (slot, &cutoff) in eval.cutoff_precision.iter_mut().zip(CUTOFFS.iter()) {
        *slot = if retrieved == 0 {
            zero
        } else {
            r_of(hits_within(cutoff)) / r_of(cutoff)
        };
    }
    eval.r_precision = if retrieved == 0 {
        zero
    } else {
        r_of(hits_within(big_r)) / r_of(big_r)
    };
    eval
}

/// Evaluates one ranked run.
pub fn evaluate_query<R: Real, S>(run: &RankedRun<S>, relevant: &BTreeSet<String>) -> QueryEval<R> {
    evaluate_ranking(&run.qid, run.docnos(), relevant)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<R> {
    pub tag: String,
    pub per_query: Vec<QueryEval<R>>,
    /// Queries evaluated but excluded from the means (no relevant documents
    /// or absent from the judgments).
    pub excluded: Vec<String>,
    pub mean_average_precision: R,
    pub mean_interp_precision: [R; RECALL_LEVELS],
    pub mean_cutoff_precision: [R; CUTOFFS.len()],
    pub mean_r_precision: R,
    pub total_retrieved: usize,
    pub total_relevant: usize,
    pub total_relevant_retrieved: usize,
}

impl<R: Real> EvalReport<R> {
    pub fn num_queries(&self) -> usize {
        self.per_query.len() - self.excluded.len()
    }

    /// Per-query average precision for queries included in the means.
    pub fn ap_by_query(&self) -> BTreeMap<&str, R> {
        self.per_query
            .iter()
            .filter(|q| !q.excluded())
            .map(|q| (q.qid.as_str(), q.average_precision))
            .collect()
    }

    /// Aggregates per-query results; means run over queries with R > 0.
    pub fn from_queries(tag: impl Into<String>, per_query: Vec<QueryEval<R>>) -> Self {
        let included: Vec<&QueryEval<R>> = per_query.iter().filter(|q| !q.excluded()).collect();
        let n = R::from_count(included.len() as u64);
        let mean = |f: &dyn Fn(&QueryEval<R>) -> R| {
            if included.is_empty() {
                R::zero()
            } else {
                included.iter().map(|q| f(q)).sum::<R>() / n
            }
        };
        let mut mean_interp = [R::zero(); RECALL_LEVELS];
        for (i, slot) in mean_interp.iter_mut().enumerate() {
            *slot = mean(&|q| q.interp_precision[i]);
        }
        let mut mean_cutoff = [R::zero(); CUTOFFS.len()];
        for (i, slot) in mean_cutoff.iter_mut().enumerate() {
            *slot = mean(&|q| q.cutoff_precision[i]);
        }
        EvalReport {
            tag: tag.into(),
            excluded: per_query
                .iter()
                .filter(|q| q.excluded())
                .map(|q| q.qid.clone())
                .collect(),
            mean_average_precision: mean(&|q| q.average_precision),
            mean_interp_precision: mean_interp,
            mean_cutoff_precision: mean_cutoff,
            mean_r_precision: mean(&|q| q.r_precision),
            total_retrieved: included.iter().map(|q| q.num_retrieved).sum(),
            total_relevant: included.iter().map(|q| q.num_relevant).sum(),
            total_relevant_retrieved: included.iter().map(|q| q.num_relevant_retrieved).sum(),
            per_query,
        }
    }
}

/// Evaluates every run. Runs whose query is missing from `qrels` are treated
/// as having no relevant documents and are flagged.
pub fn evaluate_run<R: Real, S>(runs: &[RankedRun<S>], qrels: &Qrels) -> Result<EvalReport<R>> {
    let mut seen = HashSet::new();
    for run in runs {
        if !seen.insert(run.qid.as_str()) {
            return Err(Error::DuplicateQid(run.qid.clone()));
        }
    }
    let empty = BTreeSet::new();
    let per_query = runs
        .iter()
        .map(|run| {
            let relevant = qrels.relevant(&run.qid).unwrap_or_else(|| {
                log::warn!("query {} has no relevance judgments", run.qid);
                &empty
            });
            evaluate_query(run, relevant)
        })
        .collect();
    let tag = runs.first().map(|r| r.tag.clone()).unwrap_or_default();
    Ok(EvalReport::from_queries(tag, per_query))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::RankedEntry;
    use approx::assert_relative_eq;

    fn rel(docs: &[&str]) -> BTreeSet<String> {
        docs.iter().map(|s| s.to_string()).collect()
    }

    fn run(qid: &str, docs: &[&str]) -> RankedRun<f64> {
        RankedRun {
            qid: qid.into(),
            tag: "T".into(),
            entries: docs
                .iter()
                .enumerate()
                .map(|(i, d)| RankedEntry {
                    docno: d.to_string(),
                    score: -(i as f64),
                    rank: i as u32 + 1,
                })
                .collect(),
        }
    }

    #[test]
    fn relevant_at_ranks_one_and_three() {
        let e: QueryEval<f64> = evaluate_query(&run("1", &["a", "x", "b", "y"]), &rel(&["a", "b"]));
        assert_relative_eq!(e.average_precision, (1.0 + 2.0 / 3.0) / 2.0, epsilon = 1e-15);
        assert_eq!(e.r_precision, 0.5);
        for (i, &p) in e.interp_precision.iter().enumerate() {
            let want = if i <= 5 { 1.0 } else { 2.0 / 3.0 };
            assert_relative_eq!(p, want, epsilon = 1e-15);
        }
        assert_eq!(e.num_relevant_retrieved, 2);
        assert_eq!(e.precision_at(5), Some(0.4));
        assert_eq!(e.precision_at(10), Some(0.2));
    }

    #[test]
    fn perfect_run() {
        let e: QueryEval<f64> = evaluate_query(&run("1", &["a", "b", "c", "x"]), &rel(&["a", "b", "c"]));
        assert_eq!(e.average_precision, 1.0);
        assert_eq!(e.r_precision, 1.0);
        assert!(e.interp_precision.iter().all(|&p| p == 1.0));
    }

    #[test]
    fn nothing_relevant_retrieved() {
        let e: QueryEval<f64> = evaluate_query(&run("1", &["x", "y"]), &rel(&["a"]));
        assert_eq!(e.average_precision, 0.0);
        assert!(e.interp_precision.iter().all(|&p| p == 0.0));
        let e: QueryEval<f64> = evaluate_query(&run("1", &[]), &rel(&["a"]));
        assert_eq!(e.average_precision, 0.0);
        assert_eq!(e.num_retrieved, 0);
    }

    #[test]
    fn no_relevant_documents_is_flagged() {
        let e: QueryEval<f64> = evaluate_query(&run("1", &["a"]), &rel(&[]));
        assert!(e.excluded());
        assert_eq!(e.average_precision, 0.0);
    }

    #[test]
    fn short_run_r_precision_counts_missing_as_nonrelevant() {
        let e: QueryEval<f64> = evaluate_query(&run("1", &["a"]), &rel(&["a", "b", "c", "d"]));
        assert_eq!(e.r_precision, 0.25);
    }

    #[test]
    fn qrels_parsing() {
        let q = parse_qrels("1 0 D7 1\n".as_bytes()).unwrap();
        assert_eq!(q.relevant("1").unwrap().len(), 1);
        let q = parse_qrels("1 0 D7 0\n".as_bytes()).unwrap();
        assert!(q.relevant("1").unwrap().is_empty());
        assert!(parse_qrels("".as_bytes()).unwrap().is_empty());
        let q = parse_qrels("1 0 D7 2\n\n1 0 D8 -1\n2 0 D1 1\n".as_bytes()).unwrap();
        assert_eq!(q.relevant("1").unwrap().len(), 1);
        assert_eq!(q.num_queries(), 2);
        match parse_qrels("1 0 D7 1\n1 0 D8 yes\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_qrels("1 0 D7\n".as_bytes()).is_err());
    }

    #[test]
    fn map_is_mean_over_judged_queries() {
        let mut qrels = Qrels::new();
        qrels.insert("1", "a", true);
        qrels.insert("2", "a", true);
        qrels.insert("2", "b", true);
        qrels.insert("3", "z", false);
        // AP(1) = 1.0, AP(2) = (1/2 + 2/4) / 2 = 0.5
        let runs = [
            run("1", &["a"]),
            run("2", &["x", "a", "y", "b"]),
            run("3", &["a"]),
            run("4", &["a"]),
        ];
        let report: EvalReport<f64> = evaluate_run(&runs, &qrels).unwrap();
        assert_relative_eq!(report.mean_average_precision, 0.75, epsilon = 1e-15);
        assert_eq!(report.excluded, ["3", "4"]);
        assert_eq!(report.num_queries(), 2);
        assert_eq!(report.total_relevant, 3);
        assert_eq!(report.total_relevant_retrieved, 3);
    }

    #[test]
    fn duplicate_qids_are_rejected() {
        let runs = [run("1", &["a"]), run("1", &["b"])];
        assert!(matches!(
            evaluate_run::<f64, f64>(&runs, &Qrels::new()),
            Err(Error::DuplicateQid(_))
        ));
    }

    #[test]
    fn identical_queries_give_single_ap() {
        let mut qrels = Qrels::new();
        for q in ["1", "2", "3"] {
            qrels.insert(q, "b", true);
            qrels.insert(q, "d", true);
        }
        let runs: Vec<_> = ["1", "2", "3"].iter().map(|q| run(q, &["a", "b", "c", "d"])).collect();
        let report: EvalReport<f64> = evaluate_run(&runs, &qrels).unwrap();
        assert_eq!(report.mean_average_precision, report.per_query[0].average_precision);
    }
}
