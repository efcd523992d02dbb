//! Immutable inverted index with the collection statistics needed by the
//! ranking models: document count, document lengths, document and collection
//! frequencies, and the total token count.
//!
//! Stopwords are removed at index time, so document lengths and `avgdl`
//! reflect the list in use. The analyzer (normalization flag and stoplist) is
//! stored with the index so queries go through the same pipeline.

mod format;
mod sgml;

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::Read;
use std::path::Path;

use flate2::read::MultiGzDecoder;
use rayon::prelude::*;

pub use format::{FORMAT_VERSION, MAGIC};
pub use sgml::{parse_trec_documents, RawDocument};

use crate::error::{Error, Result};
use crate::stoplists::{Stoplist, TermFrequencyTable};
use crate::textpipe::{self, Normalizer};

/// Byte encoding of corpus and topic files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Encoding {
    #[default]
    Utf8,
    /// Windows code page 1256, decoded to Unicode on input.
    Cp1256,
}

impl std::str::FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "utf8" | "utf-8" => Ok(Encoding::Utf8),
            "cp1256" | "windows-1256" => Ok(Encoding::Cp1256),
            other => Err(Error::Parameter(format!("unknown encoding `{other}`"))),
        }
    }
}

pub fn decode(bytes: &[u8], encoding: Encoding) -> Result<String> {
    match encoding {
        Encoding::Utf8 => match std::str::from_utf8(bytes) {
            Ok(s) => Ok(s.trim_start_matches('\u{FEFF}').to_owned()),
            Err(e) => Err(Error::Input(format!("invalid UTF-8 at byte {}", e.valid_up_to()))),
        },
        Encoding::Cp1256 => {
            let (text, _) = encoding_rs::WINDOWS_1256.decode_without_bom_handling(bytes);
            Ok(text.into_owned())
        }
    }
}

/// Reads a file, transparently inflating gzip content, and decodes it.
pub fn read_text_file(path: &Path, encoding: Encoding) -> Result<String> {
    let raw = fs::read(path)?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut inflated = Vec::new();
        MultiGzDecoder::new(&raw[..]).read_to_end(&mut inflated)?;
        decode(&inflated, encoding)
    } else {
        decode(&raw, encoding)
    }
}

/// Normalization, tokenization and optional stopword removal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Analyzer {
    pub normalizer: Normalizer,
    pub stoplist: Option<Stoplist>,
}

impl Analyzer {
    pub fn new(normalizer: Normalizer, stoplist: Option<Stoplist>) -> Self {
        Self { normalizer, stoplist }
    }

    pub fn with_stoplist(stoplist: Option<Stoplist>) -> Self {
        Self::new(Normalizer::default(), stoplist)
    }

    /// Surviving tokens plus the number removed as stopwords.
    pub fn analyze_counted(&self, text: &str) -> (Vec<String>, usize) {
        let norm = self.normalizer.normalize(text);
        let mut kept = Vec::new();
        let mut removed = 0;
        for tok in textpipe::tokens(&norm) {
            if self.stoplist.as_ref().is_some_and(|l| l.contains(tok)) {
                removed += 1;
            } else {
                kept.push(tok.to_owned());
            }
        }
        (kept, removed)
    }

    pub fn analyze(&self, text: &str) -> Vec<String> {
        self.analyze_counted(text).0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    /// Document ordinal.
    pub doc: u32,
    pub tf: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TermEntry {
    pub ctf: u64,
    /// Sorted by document ordinal.
    pub postings: Vec<Posting>,
}

impl TermEntry {
    pub fn df(&self) -> usize {
        self.postings.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Index {
    analyzer: Analyzer,
    removed_tokens: u64,
    docnos: Vec<String>,
    doc_lengths: Vec<u32>,
    total_tokens: u64,
    terms: Vec<String>,
    entries: Vec<TermEntry>,
}

/// Builds an index with the default normalizer on the global thread pool.
pub fn build_index(docs: &[RawDocument], stoplist: Option<&Stoplist>) -> Result<Index> {
    IndexBuilder::new(Analyzer::with_stoplist(stoplist.cloned())).build(docs)
}

#[derive(Debug, Clone)]
pub struct IndexBuilder {
    analyzer: Analyzer,
    threads: Option<usize>,
}

impl IndexBuilder {
    pub fn new(analyzer: Analyzer) -> Self {
        Self {
            analyzer,
            threads: None,
        }
    }

    /// Number of worker threads; `None` uses the global pool.
    pub fn threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn build(self, docs: &[RawDocument]) -> Result<Index> {
        let mut seen = HashSet::with_capacity(docs.len());
        for d in docs {
            if !seen.insert(d.docno.as_str()) {
                return Err(Error::DuplicateDocno(d.docno.clone()));
            }
        }
        if docs.len() > u32::MAX as usize {
            return Err(Error::Input("too many documents".into()));
        }

        let analyze = |d: &RawDocument| count_terms(&self.analyzer, &d.text);
        let per_doc: Vec<DocCounts> = match self.threads {
            None => docs.par_iter().map(analyze).collect(),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Input(format!("thread pool: {e}")))?
                .install(|| docs.par_iter().map(analyze).collect()),
        };

        // Sequential merge in document order keeps postings sorted and the
        // result independent of scheduling.
        let mut table: HashMap<String, TermEntry> = HashMap::new();
        let mut doc_lengths = Vec::with_capacity(docs.len());
        let mut total_tokens = 0u64;
        let mut removed_tokens = 0u64;
        for (ordinal, counts) in per_doc.into_iter().enumerate() {
            doc_lengths.push(counts.length);
            total_tokens += u64::from(counts.length);
            removed_tokens += counts.removed;
            for (term, tf) in counts.terms {
                let entry = table.entry(term).or_default();
                entry.ctf += u64::from(tf);
                entry.postings.push(Posting {
                    doc: ordinal as u32,
                    tf,
                });
            }
        }

        let mut pairs: Vec<(String, TermEntry)> = table.into_iter().collect();
        pairs.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let (terms, entries) = pairs.into_iter().unzip();

        Ok(Index {
            analyzer: self.analyzer,
            removed_tokens,
            docnos: docs.iter().map(|d| d.docno.clone()).collect(),
            doc_lengths,
            total_tokens,
            terms,
            entries,
        })
    }
}

struct DocCounts {
    terms: Vec<(String, u32)>,
    length: u32,
    removed: u64,
}

fn count_terms(analyzer: &Analyzer, text: &str) -> DocCounts {
    let norm = analyzer.normalizer.normalize(text);
    let mut counts: HashMap<&str, u32> = HashMap::new();
    let mut length = 0u32;
    let mut removed = 0u64;
    for tok in textpipe::tokens(&norm) {
        if analyzer.stoplist.as_ref().is_some_and(|l| l.contains(tok)) {
            removed += 1;
            continue;
        }
        length += 1;
        *counts.entry(tok).or_insert(0) += 1;
    }
    DocCounts {
        terms: counts.into_iter().map(|(t, c)| (t.to_owned(), c)).collect(),
        length,
        removed,
    }
}

impl Index {
    pub fn analyzer(&self) -> &Analyzer {
        &self.analyzer
    }

    pub fn stoplist(&self) -> Option<&Stoplist> {
        self.analyzer.stoplist.as_ref()
    }

    /// Number of documents, including those left empty by stopword removal.
    pub fn num_docs(&self) -> usize {
        self.docnos.len()
    }

    pub fn docno(&self, ordinal: u32) -> &str {
        &self.docnos[ordinal as usize]
    }

    pub fn docnos(&self) -> &[String] {
        &self.docnos
    }

    pub fn doc_len(&self, ordinal: u32) -> u32 {
        self.doc_lengths[ordinal as usize]
    }

    pub fn doc_lengths(&self) -> &[u32] {
        &self.doc_lengths
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Tokens dropped as stopwords during the build.
    pub fn removed_tokens(&self) -> u64 {
        self.removed_tokens
    }

    /// Mean document length; zero for an empty collection.
    pub fn avgdl(&self) -> f64 {
        if self.docnos.is_empty() {
            0.0
        } else {
            self.total_tokens as f64 / self.docnos.len() as f64
        }
    }

    pub fn vocabulary_size(&self) -> usize {
        self.terms.len()
    }

    pub fn term(&self, term: &str) -> Option<&TermEntry> {
        self.terms
            .binary_search_by(|t| t.as_str().cmp(term))
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn df(&self, term: &str) -> usize {
        self.term(term).map_or(0, TermEntry::df)
    }

    pub fn ctf(&self, term: &str) -> u64 {
        self.term(term).map_or(0, |e| e.ctf)
    }

    /// Terms in lexicographic order with their entries.
    pub fn iter_terms(&self) -> impl Iterator<Item = (&str, &TermEntry)> {
        self.terms.iter().map(String::as_str).zip(&self.entries)
    }

    pub fn term_frequencies(&self) -> TermFrequencyTable {
        self.iter_terms().map(|(t, e)| (t, e.ctf)).collect()
    }

    /// Verifies the structural and count invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |m: String| Err(Error::IndexFormat(m));
        let n = self.docnos.len();
        if self.doc_lengths.len() != n {
            return fail("document table length mismatch".into());
        }
        if self.terms.len() != self.entries.len() {
            return fail("term dictionary length mismatch".into());
        }
        if self.terms.windows(2).any(|w| w[0] >= w[1]) {
            return fail("term dictionary is not strictly sorted".into());
        }
        let sum_dl: u64 = self.doc_lengths.iter().map(|&l| u64::from(l)).sum();
        if sum_dl != self.total_tokens {
            return fail(format!("sum of lengths {sum_dl} != total tokens {}", self.total_tokens));
        }
        let mut sum_ctf = 0u64;
        for (term, e) in self.iter_terms() {
            if e.postings.is_empty() {
                return fail(format!("term `{term}` has no postings"));
            }
            if e.postings.windows(2).any(|w| w[0].doc >= w[1].doc) {
                return fail(format!("postings of `{term}` are not sorted"));
            }
            if e.postings.iter().any(|p| p.tf == 0 || p.doc as usize >= n) {
                return fail(format!("bad posting for `{term}`"));
            }
            let tf_sum: u64 = e.postings.iter().map(|p| u64::from(p.tf)).sum();
            if tf_sum != e.ctf {
                return fail(format!("ctf of `{term}` is {} but postings sum to {tf_sum}", e.ctf));
            }
            if e.df() > n || e.df() as u64 > e.ctf {
                return fail(format!("df of `{term}` out of range"));
            }
            sum_ctf += e.ctf;
        }
        if sum_ctf != self.total_tokens {
            return fail(format!("sum of ctf {sum_ctf} != total tokens {}", self.total_tokens));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stoplists::Provenance;
    use proptest::prelude::*;

    fn toy() -> Vec<RawDocument> {
        vec![
            RawDocument::new("D1", "a b"),
            RawDocument::new("D2", "b c"),
            RawDocument::new("D3", "c c"),
        ]
    }

    #[test]
    fn toy_counts() {
        let idx = build_index(&toy(), None).unwrap();
        assert_eq!(idx.num_docs(), 3);
        assert_eq!(idx.avgdl(), 2.0);
        assert_eq!(idx.df("a"), 1);
        assert_eq!(idx.df("b"), 2);
        assert_eq!(idx.ctf("c"), 3);
        assert_eq!(idx.total_tokens(), 6);
        assert_eq!(idx.removed_tokens(), 0);
        idx.check_invariants().unwrap();
    }

    #[test]
    fn toy_counts_with_stoplist() {
        let stop = Stoplist::from_words("S", Provenance::Custom, ["b"]);
        let idx = build_index(&toy(), Some(&stop)).unwrap();
        assert_eq!(idx.doc_len(0), 1);
        assert_eq!(idx.doc_len(1), 1);
        assert_eq!(idx.total_tokens(), 4);
        assert_eq!(idx.removed_tokens(), 2);
        assert!(idx.term("b").is_none());
        idx.check_invariants().unwrap();
    }

    #[test]
    fn empty_corpus() {
        let idx = build_index(&[], None).unwrap();
        assert_eq!(idx.num_docs(), 0);
        assert_eq!(idx.vocabulary_size(), 0);
        assert_eq!(idx.avgdl(), 0.0);
        idx.check_invariants().unwrap();
    }

    #[test]
    fn empty_documents_are_kept() {
        let stop = Stoplist::from_words("S", Provenance::Custom, ["x"]);
        let docs = [RawDocument::new("A", "x x"), RawDocument::new("B", "y")];
        let idx = build_index(&docs, Some(&stop)).unwrap();
        assert_eq!(idx.num_docs(), 2);
        assert_eq!(idx.doc_len(0), 0);
        assert_eq!(idx.avgdl(), 0.5);
    }

    #[test]
    fn duplicate_docno_is_rejected() {
        let docs = [RawDocument::new("A", "x"), RawDocument::new("A", "y")];
        match build_index(&docs, None) {
            Err(Error::DuplicateDocno(d)) => assert_eq!(d, "A"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn normalization_applies_before_counting() {
        let docs = [RawDocument::new("A", "أخبار اخبار إخبار")];
        let idx = build_index(&docs, None).unwrap();
        assert_eq!(idx.ctf("اخبار"), 3);
        assert_eq!(idx.vocabulary_size(), 1);
    }

    #[test]
    fn cp1256_decoding() {
        // "قال" in CP1256
        let bytes = [0xDE, 0xC7, 0xE1];
        assert_eq!(decode(&bytes, Encoding::Cp1256).unwrap(), "قال");
        assert!(decode(&[0xff], Encoding::Utf8).is_err());
    }

    fn corpus() -> impl Strategy<Value = Vec<RawDocument>> {
        prop::collection::vec(prop::collection::vec("[a-h]", 0..12), 0..25).prop_map(|docs| {
            docs.into_iter()
                .enumerate()
                .map(|(i, words)| RawDocument::new(format!("D{i}"), words.join(" ")))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn invariants_hold(docs in corpus()) {
            let idx = build_index(&docs, None).unwrap();
            prop_assert!(idx.check_invariants().is_ok());
        }

        #[test]
        fn stoplist_removal_accounts_for_ctf(docs in corpus(), stop in prop::collection::btree_set("[a-h]", 0..4)) {
            let plain = build_index(&docs, None).unwrap();
            let list = Stoplist::from_words("S", Provenance::Custom, &stop);
            let filtered = build_index(&docs, Some(&list)).unwrap();
            let stop_ctf: u64 = stop.iter().map(|w| plain.ctf(w)).sum();
            prop_assert!(filtered.total_tokens() <= plain.total_tokens());
            prop_assert_eq!(plain.total_tokens() - filtered.total_tokens(), stop_ctf);
            prop_assert_eq!(filtered.removed_tokens(), stop_ctf);
        }
    }
}
