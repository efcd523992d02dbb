//! Evaluation reports: an aligned plain-text summary in the classic
//! trec_eval/ireval layout, and a tab-separated table with one row per query
//! plus an `all` row holding the means.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use std::path::Path;

use arir::treceval::{CUTOFFS, RECALL_LEVELS};
use arir::{EvalReport, QueryEval};

use crate::error::{CliError, Result};

struct Block<'a> {
    qid: &'a str,
    retrieved: usize,
    relevant: usize,
    rel_ret: usize,
    interp: &'a [f64; RECALL_LEVELS],
    ap: f64,
    cutoff: &'a [f64; CUTOFFS.len()],
    r_prec: f64,
}

fn write_block(out: &mut String, b: &Block<'_>) {
    let _ = writeln!(out, "Queryid (Num):    {}", b.qid);
    let _ = writeln!(out, "Total number of documents over all queries");
    let _ = writeln!(out, "    Retrieved:  {:>8}", b.retrieved);
    let _ = writeln!(out, "    Relevant:   {:>8}", b.relevant);
    let _ = writeln!(out, "    Rel_ret:    {:>8}", b.rel_ret);
    let _ = writeln!(out, "Interpolated Recall - Precision Averages:");
    for (i, p) in b.interp.iter().enumerate() {
        let _ = writeln!(out, "    at {:.2}       {p:.4}", i as f64 / 10.0);
    }
    let _ = writeln!(
        out,
        "Average precision (non-interpolated) for all rel docs(averaged over queries)"
    );
    let _ = writeln!(out, "                  {:.4}", b.ap);
    let _ = writeln!(out, "Precision:");
    for (c, p) in CUTOFFS.iter().zip(b.cutoff) {
        let _ = writeln!(out, "  At {c:>4} docs:   {p:.4}");
    }
    let _ = writeln!(
        out,
        "R-Precision (precision after R (= num_rel for a query) docs retrieved):"
    );
    let _ = writeln!(out, "    Exact:        {:.4}", b.r_prec);
}

fn query_block(q: &QueryEval) -> Block<'_> {
    Block {
        qid: &q.qid,
        retrieved: q.num_retrieved,
        relevant: q.num_relevant,
        rel_ret: q.num_relevant_retrieved,
        interp: &q.interp_precision,
        ap: q.average_precision,
        cutoff: &q.cutoff_precision,
        r_prec: q.r_precision,
    }
}

/// Plain-text report; per-query blocks first when `per_query` is set.
pub fn render_text(report: &EvalReport, per_query: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Run: {}", report.tag);
    let _ = writeln!(out, "Queries evaluated: {}", report.num_queries());
    if !report.excluded.is_empty() {
        let _ = writeln!(
            out,
            "Queries without relevant documents (excluded from means): {}",
            report.excluded.join(" ")
        );
    }
    let _ = writeln!(out);
    if per_query {
        for q in &report.per_query {
            write_block(&mut out, &query_block(q));
            let _ = writeln!(out);
        }
    }
    let all = format!("all ({})", report.num_queries());
    write_block(
        &mut out,
        &Block {
            qid: &all,
            retrieved: report.total_retrieved,
            relevant: report.total_relevant,
            rel_ret: report.total_relevant_retrieved,
            interp: &report.mean_interp_precision,
            ap: report.mean_average_precision,
            cutoff: &report.mean_cutoff_precision,
            r_prec: report.mean_r_precision,
        },
    );
    out
}

fn header() -> String {
    let mut cols = vec!["tag", "qid", "num_rel", "num_ret", "num_rel_ret", "map", "R-prec"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    cols.extend(CUTOFFS.iter().map(|c| format!("P{c}")));
    cols.extend((0..RECALL_LEVELS).map(|i| format!("ircl_prn.{:.1}", i as f64 / 10.0)));
    cols.join("\t")
}

fn row(out: &mut String, tag: &str, b: &Block<'_>) {
    let _ = write!(
        out,
        "{tag}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
        b.qid, b.relevant, b.retrieved, b.rel_ret, b.ap, b.r_prec
    );
    for p in b.cutoff.iter().chain(b.interp.iter()) {
        let _ = write!(out, "\t{p:.6}");
    }
    out.push('\n');
}

pub fn render_tsv(report: &EvalReport) -> String {
    let mut out = header();
    out.push('\n');
    for q in &report.per_query {
        row(&mut out, &report.tag, &query_block(q));
    }
    row(
        &mut out,
        &report.tag,
        &Block {
            qid: "all",
            retrieved: report.total_retrieved,
            relevant: report.total_relevant,
            rel_ret: report.total_relevant_retrieved,
            interp: &report.mean_interp_precision,
            ap: report.mean_average_precision,
            cutoff: &report.mean_cutoff_precision,
            r_prec: report.mean_r_precision,
        },
    );
    out
}

/// Per-query average precision read back from a TSV report.
#[derive(Debug, Clone, PartialEq)]
pub struct ApTable {
    pub tag: String,
    /// Queries with at least one relevant document.
    pub ap: BTreeMap<String, f64>,
}

pub fn read_ap_table<R: BufRead>(input: R, path: &Path) -> Result<ApTable> {
    let bad = |line: usize, message: String| CliError::Format {
        path: path.to_owned(),
        line,
        message,
    };
    let mut lines = input.lines().enumerate();
    let cols: Vec<String> = match lines.next() {
        Some((_, l)) => l
            .map_err(|e| CliError::file(path, e))?
            .split('\t')
            .map(String::from)
            .collect(),
        None => return Err(bad(1, "empty report".into())),
    };
    let col = |name: &str| {
        cols.iter()
            .position(|c| c == name)
            .ok_or_else(|| bad(1, format!("missing column `{name}`")))
    };
    let (tag_c, qid_c, rel_c, map_c) = (col("tag")?, col("qid")?, col("num_rel")?, col("map")?);
    let mut tag = None;
    let mut ap = BTreeMap::new();
    for (i, line) in lines {
        let line = line.map_err(|e| CliError::file(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != cols.len() {
            return Err(bad(i + 1, format!("expected {} fields, found {}", cols.len(), f.len())));
        }
        tag.get_or_insert_with(|| f[tag_c].to_owned());
        if f[qid_c] == "all" {
            continue;
        }
        let rel: usize = f[rel_c]
            .parse()
            .map_err(|_| bad(i + 1, format!("bad num_rel `{}`", f[rel_c])))?;
        let value: f64 = f[map_c]
            .parse()
            .map_err(|_| bad(i + 1, format!("bad map `{}`", f[map_c])))?;
        if rel > 0 && ap.insert(f[qid_c].to_owned(), value).is_some() {
            return Err(bad(i + 1, format!("query {} appears twice", f[qid_c])));
        }
    }
    Ok(ApTable {
        tag: tag.unwrap_or_default(),
        ap,
    })
}

pub fn load_ap_table(path: &Path) -> Result<ApTable> {
    let file = std::fs::File::open(path).map_err(|e| CliError::file(path, e))?;
    read_ap_table(io::BufReader::new(file), path)
}

pub fn write_text<W: Write>(mut out: W, text: &str) -> io::Result<()> {
    out.write_all(text.as_bytes())?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use arir::treceval::evaluate_ranking;
    use std::collections::BTreeSet;

    fn report() -> EvalReport {
        let rel: BTreeSet<String> = ["A", "C"].iter().map(|s| s.to_string()).collect();
        let q1: QueryEval = evaluate_ranking("1", ["A", "B", "C"], &rel);
        let q2: QueryEval = evaluate_ranking("2", ["B"], &BTreeSet::new());
        EvalReport::from_queries("BM25_GS", vec![q1, q2])
    }

    #[test]
    fn text_has_every_section() {
        let text = render_text(&report(), true);
        for needle in [
            "Queryid (Num):    1",
            "Queryid (Num):    all (1)",
            "    at 0.50       1.0000",
            "    at 0.60       0.6667",
            "                  0.8333",
            "  At    5 docs:   0.4000",
            "  At 1000 docs:   0.0020",
            "    Exact:        0.5000",
            "excluded from means): 2",
        ] {
            assert!(text.contains(needle), "missing `{needle}` in\n{text}");
        }
    }

    #[test]
    fn tsv_round_trips_ap() {
        let tsv = render_tsv(&report());
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("BM25_GS\tall\t2\t3\t2\t0.833333"));
        let table = read_ap_table(tsv.as_bytes(), Path::new("r.tsv")).unwrap();
        assert_eq!(table.tag, "BM25_GS");
        assert_eq!(table.ap.len(), 1);
        assert_eq!(table.ap["1"], 0.833333);
    }
}
