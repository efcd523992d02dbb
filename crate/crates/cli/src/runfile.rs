//! TREC run files: one line per retrieved document,
//! `qid Q0 docno rank score tag`, space separated, ranks from 1, scores with
//! six decimals.

use std::collections::{HashMap, HashSet};
use std::io::{self, BufRead, Write};
use std::path::Path;

use arir::ranking::{RankedEntry, RankedRun};

use crate::error::{CliError, Result};

pub fn write_runs<W: Write>(mut out: W, runs: &[RankedRun<f64>]) -> io::Result<()> {
    for run in runs {
        write!(out, "{run}")?;
    }
    out.flush()
}

/// Parses a run file. Lines are grouped by query in order of first
/// appearance and sorted by their rank field.
pub fn read_runs<R: BufRead>(input: R, path: &Path) -> Result<Vec<RankedRun<f64>>> {
    let bad = |line: usize, message: String| CliError::Format {
        path: path.to_owned(),
        line,
        message,
    };
    let mut runs: Vec<RankedRun<f64>> = Vec::new();
    let mut slot: HashMap<String, usize> = HashMap::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| CliError::file(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            return Err(bad(line_no, format!("expected 6 fields, found {}", f.len())));
        }
        let rank: u32 = f[3]
            .parse()
            .map_err(|_| bad(line_no, format!("rank `{}` is not a positive integer", f[3])))?;
        let score: f64 = f[4]
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| bad(line_no, format!("score `{}` is not a number", f[4])))?;
        if !seen.insert((f[0].to_owned(), f[2].to_owned())) {
            return Err(bad(
                line_no,
                format!("document {} listed twice for query {}", f[2], f[0]),
            ));
        }
        let idx = *slot.entry(f[0].to_owned()).or_insert_with(|| {
            runs.push(RankedRun {
                qid: f[0].to_owned(),
                tag: f[5].to_owned(),
                entries: Vec::new(),
            });
            runs.len() - 1
        });
        runs[idx].entries.push(RankedEntry {
            docno: f[2].to_owned(),
            score,
            rank,
        });
    }
    for run in &mut runs {
        run.entries.sort_by_key(|e| e.rank);
    }
    Ok(runs)
}

pub fn load_runs(path: &Path) -> Result<Vec<RankedRun<f64>>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::file(path, e))?;
    read_runs(io::BufReader::new(file), path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(qid: &str, docs: &[(&str, f64)]) -> RankedRun<f64> {
        RankedRun {
            qid: qid.into(),
            tag: "BM25_GS".into(),
            entries: docs
                .iter()
                .enumerate()
                .map(|(i, (d, s))| RankedEntry {
                    docno: (*d).into(),
                    score: *s,
                    rank: i as u32 + 1,
                })
                .collect(),
        }
    }

    #[test]
    fn write_then_read_reproduces_runs() {
        let runs = vec![run("2", &[("B", 1.5), ("A", -0.25)]), run("1", &[("C", 0.125)])];
        let mut buf = Vec::new();
        write_runs(&mut buf, &runs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), "2 Q0 B 1 1.500000 BM25_GS");
        let back = read_runs(&buf[..], Path::new("x.run")).unwrap();
        assert_eq!(back, runs);
        let mut again = Vec::new();
        write_runs(&mut again, &back).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn malformed_line_is_named() {
        let text = "1 Q0 A 1 0.5 T\n1 Q0 B two 0.4 T\n";
        let err = read_runs(text.as_bytes(), Path::new("r.run")).unwrap_err();
        assert!(err.to_string().starts_with("r.run:2:"), "{err}");
        let err = read_runs("1 Q0 A 1 0.5\n".as_bytes(), Path::new("r.run")).unwrap_err();
        assert!(err.to_string().contains("r.run:1: expected 6 fields"), "{err}");
    }

    #[test]
    fn duplicate_document_rejected() {
        let text = "1 Q0 A 1 0.5 T\n1 Q0 A 2 0.4 T\n";
        assert!(read_runs(text.as_bytes(), Path::new("r")).is_err());
    }

    #[test]
    fn empty_file_has_no_runs() {
        assert!(read_runs(&b""[..], Path::new("r")).unwrap().is_empty());
    }
}
