//! Stopword lists: the bundled general (GS) and corpus-based (CBS) lists,
//! frequency-cutoff construction, union and filtering.
//!
//! Every entry is normalized with the same [`Normalizer`] that is applied to
//! documents and queries, so membership tests compare like with like.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::textpipe::{self, Normalizer};

const GENERAL_LIST: &str = include_str!("../data/general.txt");
const CORPUS_BASED_LIST: &str = include_str!("../data/corpus_based.txt");

/// Frequency cutoff used for the bundled corpus-based list.
pub const DEFAULT_CUTOFF: u64 = 25_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    General,
    CorpusBased,
    Combined,
    Custom,
}

impl Provenance {
    pub fn code(self) -> u8 {
        match self {
            Provenance::General => 0,
            Provenance::CorpusBased => 1,
            Provenance::Combined => 2,
            Provenance::Custom => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => Provenance::General,
            1 => Provenance::CorpusBased,
            2 => Provenance::Combined,
            3 => Provenance::Custom,
            _ => return None,
        })
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::General => "general",
            Provenance::CorpusBased => "corpus-based",
            Provenance::Combined => "combined",
            Provenance::Custom => "custom",
        })
    }
}

/// Which of the bundled lists to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bundled {
    General,
    CorpusBased,
    Combined,
}

impl Bundled {
    pub fn code(self) -> &'static str {
        match self {
            Bundled::General => "GS",
            Bundled::CorpusBased => "CBS",
            Bundled::Combined => "CS",
        }
    }

    pub fn load(self) -> Stoplist {
        match self {
            Bundled::General => Stoplist::general(),
            Bundled::CorpusBased => Stoplist::corpus_based(),
            Bundled::Combined => Stoplist::combined(),
        }
    }
}

impl FromStr for Bundled {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "GS" => Ok(Bundled::General),
            "CBS" => Ok(Bundled::CorpusBased),
            "CS" => Ok(Bundled::Combined),
            other => Err(Error::Parameter(format!("unknown stoplist code `{other}`"))),
        }
    }
}

/// A named set of normalized stopwords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stoplist {
    name: String,
    provenance: Provenance,
    words: BTreeSet<String>,
}

impl Stoplist {
    pub fn empty(name: impl Into<String>, provenance: Provenance) -> Self {
        Self {
            name: name.into(),
            provenance,
            words: BTreeSet::new(),
        }
    }

    /// Builds a list from raw words, normalizing each one. Words that split
    /// into several tokens contribute every token.
    pub fn from_words<I, S>(name: impl Into<String>, provenance: Provenance, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let normalizer = Normalizer::default();
        let mut list = Self::empty(name, provenance);
        for w in words {
            list.insert_raw(&normalizer, w.as_ref());
        }
        list
    }

    /// Builds a list from words that are already normalized tokens.
    pub(crate) fn from_normalized(name: impl Into<String>, provenance: Provenance, words: BTreeSet<String>) -> Self {
        Self {
            name: name.into(),
            provenance,
            words,
        }
    }

    fn insert_raw(&mut self, normalizer: &Normalizer, raw: &str) {
        let norm = normalizer.normalize(raw);
        for tok in textpipe::tokens(&norm) {
            self.words.insert(tok.to_owned());
        }
    }

    pub fn general() -> Self {
        load_stoplist(GENERAL_LIST.as_bytes(), "GS", Provenance::General).expect("bundled general list is valid UTF-8")
    }

    pub fn corpus_based() -> Self {
        load_stoplist(CORPUS_BASED_LIST.as_bytes(), "CBS", Provenance::CorpusBased)
            .expect("bundled corpus-based list is valid UTF-8")
    }

    pub fn combined() -> Self {
        combine(&Self::general(), &Self::corpus_based())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn words(&self) -> &BTreeSet<String> {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Membership of an already-normalized token.
    #[inline]
    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn intersection_len(&self, other: &Stoplist) -> usize {
        self.words.intersection(&other.words).count()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Writes one word per line in sorted order, preceded by a comment header.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "# stoplist {} ({}), {} words",
            self.name,
            self.provenance,
            self.len()
        )?;
        for w in &self.words {
            writeln!(out, "{w}")?;
        }
        Ok(())
    }
}

/// Reads a stoplist: UTF-8, one word per line. Blank lines and lines whose
/// first non-blank character is `#` are skipped.
pub fn load_stoplist<R: BufRead>(mut source: R, name: impl Into<String>, provenance: Provenance) -> Result<Stoplist> {
    let normalizer = Normalizer::default();
    let mut list = Stoplist::empty(name, provenance);
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if source.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = std::str::from_utf8(&buf).map_err(|_| Error::Utf8 { line: line_no })?;
        let line = line.trim_start_matches('\u{FEFF}').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        list.insert_raw(&normalizer, line);
    }
    Ok(list)
}

/// Collection frequency of each normalized term.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermFrequencyTable {
    entries: BTreeMap<String, u64>,
}

impl TermFrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: impl Into<String>, count: u64) {
        *self.entries.entry(term.into()).or_insert(0) += count;
    }

    /// Counts every token of already-normalized text.
    pub fn add_tokens<'a, I: IntoIterator<Item = &'a str>>(&mut self, tokens: I) {
        for t in tokens {
            if let Some(c) = self.entries.get_mut(t) {
                *c += 1;
            } else {
                self.entries.insert(t.to_owned(), 1);
            }
        }
    }

    pub fn get(&self, term: &str) -> u64 {
        self.entries.get(term).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_frequency(&self) -> u64 {
        self.entries.values().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(t, &c)| (t.as_str(), c))
    }
}

impl<S: Into<String>> FromIterator<(S, u64)> for TermFrequencyTable {
    fn from_iter<I: IntoIterator<Item = (S, u64)>>(iter: I) -> Self {
        let mut table = Self::new();
        for (t, c) in iter {
            table.add(t, c);
        }
        table
    }
}

/// Terms occurring strictly more than `cutoff` times, minus `exclusions`.
pub fn build_corpus_stoplist(freqs: &TermFrequencyTable, cutoff: u64, exclusions: &BTreeSet<String>) -> Stoplist {
    let words = freqs
        .iter()
        .filter(|&(t, c)| c > cutoff && !exclusions.contains(t))
        .map(|(t, _)| t.to_owned())
        .collect();
    Stoplist::from_normalized("CBS", Provenance::CorpusBased, words)
}

/// Union of two lists. The general and corpus-based pair is named `CS`.
pub fn combine(a: &Stoplist, b: &Stoplist) -> Stoplist {
    let name = match (a.provenance, b.provenance) {
        (Provenance::General, Provenance::CorpusBased) | (Provenance::CorpusBased, Provenance::General) => {
            "CS".to_owned()
        }
        _ => format!("{}+{}", a.name, b.name),
    };
    let words = a.words.union(&b.words).cloned().collect();
    Stoplist::from_normalized(name, Provenance::Combined, words)
}

/// Drops every token found in `list`, keeping the order of the rest.
pub fn filter_tokens<T: AsRef<str>>(tokens: impl IntoIterator<Item = T>, list: &Stoplist) -> Vec<T> {
    tokens.into_iter().filter(|t| !list.contains(t.as_ref())).collect()
}
