//! Technique comparison over per-query average precision: a Friedman table
//! across all techniques and a Wilcoxon table of each technique against a
//! baseline.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use arir::sigtest::{friedman, wilcoxon_signed_rank, ALPHA};
use arir::{FriedmanResult, ScoreMatrix, WilcoxonResult};

use crate::error::{CliError, Result};
use crate::report::ApTable;

pub const DEFAULT_BASELINE: &str = "TFIDF";

/// Labels: run tags when they are distinct, file stems otherwise.
pub fn labels_for(tables: &[ApTable], paths: &[&Path]) -> Result<Vec<String>> {
    let tags: Vec<String> = tables.iter().map(|t| t.tag.clone()).collect();
    let distinct = |v: &[String]| v.iter().collect::<HashSet<_>>().len() == v.len() && v.iter().all(|s| !s.is_empty());
    if distinct(&tags) {
        return Ok(tags);
    }
    let stems: Vec<String> = paths
        .iter()
        .map(|p| {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        })
        .collect();
    if distinct(&stems) {
        return Ok(stems);
    }
    Err(CliError::usage("reports need distinct run tags or distinct file names"))
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub labels: Vec<String>,
    pub qids: Vec<String>,
    pub mean_precision: Vec<f64>,
    pub friedman: FriedmanResult,
    pub baseline: usize,
    /// One entry per technique; `None` for the baseline itself.
    pub wilcoxon: Vec<Option<WilcoxonResult>>,
}

fn check_same_queries(labels: &[String], tables: &[ApTable]) -> Result<BTreeSet<String>> {
    let reference: BTreeSet<String> = tables[0].ap.keys().cloned().collect();
    let mut problems = Vec::new();
    for (label, t) in labels.iter().zip(tables).skip(1) {
        let these: BTreeSet<String> = t.ap.keys().cloned().collect();
        let missing: Vec<&String> = reference.difference(&these).collect();
        let extra: Vec<&String> = these.difference(&reference).collect();
        if !missing.is_empty() {
            problems.push(format!("{label} lacks queries {missing:?} present in {}", labels[0]));
        }
        if !extra.is_empty() {
            problems.push(format!("{label} has queries {extra:?} absent from {}", labels[0]));
        }
    }
    if problems.is_empty() {
        Ok(reference)
    } else {
        Err(CliError::Data(format!("query sets differ: {}", problems.join("; "))))
    }
}

pub fn compare(labels: Vec<String>, tables: &[ApTable], baseline: &str) -> Result<Comparison> {
    if tables.len() < 2 {
        return Err(CliError::usage("compare needs at least two reports"));
    }
    let base = labels
        .iter()
        .position(|l| l == baseline)
        .ok_or_else(|| CliError::usage(format!("baseline `{baseline}` not among techniques {labels:?}")))?;
    let qids: Vec<String> = check_same_queries(&labels, tables)?.into_iter().collect();
    if qids.len() < 2 {
        return Err(CliError::Data(format!(
            "need at least 2 judged queries, found {}",
            qids.len()
        )));
    }
    let rows: Vec<Vec<f64>> = qids.iter().map(|q| tables.iter().map(|t| t.ap[q]).collect()).collect();
    let matrix = ScoreMatrix::new(labels.clone(), rows)?;
    let friedman = friedman(&matrix)?;
    let mean_precision = (0..labels.len()).map(|j| matrix.column_mean(j)).collect();
    let base_col = matrix.column(base);
    let wilcoxon = (0..labels.len())
        .map(|j| {
            (j != base)
                .then(|| wilcoxon_signed_rank(&matrix.column(j), &base_col))
                .transpose()
        })
        .collect::<arir::Result<Vec<_>>>()?;
    Ok(Comparison {
        labels,
        qids,
        mean_precision,
        friedman,
        baseline: base,
        wilcoxon,
    })
}

fn star(p: f64) -> &'static str {
    if p < ALPHA {
        "*"
    } else {
        ""
    }
}

impl Comparison {
    /// Techniques ordered by Friedman mean rank, lowest first.
    fn by_mean_rank(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.labels.len()).collect();
        order.sort_by(|&a, &b| {
            self.friedman.mean_ranks[a]
                .total_cmp(&self.friedman.mean_ranks[b])
                .then_with(|| self.labels[a].cmp(&self.labels[b]))
        });
        order
    }

    /// Non-baseline techniques ordered by number of queries beating the baseline.
    fn by_wins(&self) -> Vec<(usize, &WilcoxonResult)> {
        let mut rows: Vec<(usize, &WilcoxonResult)> = self
            .wilcoxon
            .iter()
            .enumerate()
            .filter_map(|(j, w)| w.as_ref().map(|w| (j, w)))
            .collect();
        rows.sort_by(|a, b| {
            a.1.better
                .cmp(&b.1.better)
                .then_with(|| self.labels[a.0].cmp(&self.labels[b.0]))
        });
        rows
    }

    pub fn friedman_table(&self) -> String {
        let width = self
            .labels
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max("Technique".len());
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Friedman test over {} techniques, {} queries",
            self.labels.len(),
            self.qids.len()
        );
        let _ = writeln!(
            out,
            "{:<width$}  {:>14}  {:>9}",
            "Technique", "Mean Precision", "Mean Rank"
        );
        for j in self.by_mean_rank() {
            let _ = writeln!(
                out,
                "{:<width$}  {:>14.4}  {:>9.2}",
                self.labels[j], self.mean_precision[j], self.friedman.mean_ranks[j]
            );
        }
        let f = &self.friedman;
        let _ = writeln!(
            out,
            "chi2 = {:.3}  df = {}  p = {:.3}{}",
            f.chi2,
            f.df,
            f.p_value,
            star(f.p_value)
        );
        out
    }

    pub fn wilcoxon_table(&self) -> String {
        let base = &self.labels[self.baseline];
        let width = self
            .labels
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max("Technique".len());
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Wilcoxon signed-rank test against baseline {base} (mean {:.4})",
            self.mean_precision[self.baseline]
        );
        let _ = writeln!(
            out,
            "{:<width$}  {:>14}  {:>7}  {:>7}  {:>7}  {:>7}",
            "Technique", "Mean Precision", "QP > BP", "QP < BP", "QP = BP", "P-Value"
        );
        for (j, w) in self.by_wins() {
            let _ = writeln!(
                out,
                "{:<width$}  {:>14.4}  {:>7}  {:>7}  {:>7}  {:>7.3}{}",
                self.labels[j],
                self.mean_precision[j],
                w.better,
                w.worse,
                w.tied,
                w.p_value,
                star(w.p_value)
            );
        }
        let _ = writeln!(
            out,
            "QP: query precision; BP: baseline precision ({base}); * p < {ALPHA}"
        );
        out
    }

    pub fn friedman_tsv(&self) -> String {
        let mut out = String::from("technique\tmean_precision\tmean_rank\n");
        for j in self.by_mean_rank() {
            let _ = writeln!(
                out,
                "{}\t{:.6}\t{:.6}",
                self.labels[j], self.mean_precision[j], self.friedman.mean_ranks[j]
            );
        }
        let f = &self.friedman;
        let _ = writeln!(out, "#chi2\t{:.6}\tdf={}\tp={:e}", f.chi2, f.df, f.p_value);
        out
    }

    pub fn wilcoxon_tsv(&self) -> String {
        let mut out =
            String::from("technique\tbaseline\tmean_precision\tbetter\tworse\ttied\tw_plus\tw_minus\tp_value\texact\n");
        let base = &self.labels[self.baseline];
        for (j, w) in self.by_wins() {
            let _ = writeln!(
                out,
                "{}\t{base}\t{:.6}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}",
                self.labels[j],
                self.mean_precision[j],
                w.better,
                w.worse,
                w.tied,
                w.w_plus,
                w.w_minus,
                w.p_value,
                w.exact
            );
        }
        out
    }
}
