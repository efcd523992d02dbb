// Single-file index format, all integers little-endian:
//
//   magic        8 bytes  "ARIRIDX\0"
//   version      u32      FORMAT_VERSION
//   flags        u32      bit 0: marks stripped, bit 1: stoplist present
//   [stoplist]   str name, u8 provenance, u32 count, str word * count
//   removed      u64      tokens dropped as stopwords
//   doc_count    u32
//   docs         (str docno, u32 length) * doc_count
//   total        u64      total tokens
//   term_count   u32
//   terms        (str term, u64 ctf, u32 df, (u32 doc, u32 tf) * df) * term_count
//   magic        8 bytes  trailer, repeated
//
// `str` is a u32 byte length followed by UTF-8 bytes. Terms are written in
// lexicographic order, postings in document order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Analyzer, Index, Posting, TermEntry};
use crate::error::{Error, Result};
use crate::stoplists::{Provenance, Stoplist};
use crate::textpipe::Normalizer;

pub const MAGIC: &[u8; 8] = b"ARIRIDX\0";
pub const FORMAT_VERSION: u32 = 1;

const FLAG_STRIP_MARKS: u32 = 1;
const FLAG_STOPLIST: u32 = 1 << 1;

fn corrupt(msg: impl Into<String>) -> Error {
    Error::IndexFormat(msg.into())
}

struct Writer<W: Write>(W);

impl<W: Write> Writer<W> {
    fn u8(&mut self, v: u8) -> Result<()> {
        Ok(self.0.write_all(&[v])?)
    }
    fn u32(&mut self, v: u32) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn u64(&mut self, v: u64) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn len(&mut self, n: usize) -> Result<()> {
        let n = u32::try_from(n).map_err(|_| corrupt("length exceeds u32"))?;
        self.u32(n)
    }
    fn str(&mut self, s: &str) -> Result<()> {
        self.len(s.len())?;
        Ok(self.0.write_all(s.as_bytes())?)
    }
}

struct Reader<R: Read>(R);

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.0.read_exact(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => corrupt("truncated file"),
            _ => Error::Io(e),
        })?;
        Ok(buf)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }
    fn str(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        let mut buf = Vec::new();
        (&mut self.0).take(len as u64).read_to_end(&mut buf)?;
        if buf.len() != len {
            return Err(corrupt("truncated file"));
        }
        String::from_utf8(buf).map_err(|_| corrupt("string is not UTF-8"))
    }
}

impl Index {
    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let mut w = Writer(out);
        w.0.write_all(MAGIC)?;
        w.u32(FORMAT_VERSION)?;
        let mut flags = 0;
        if self.analyzer.normalizer.strip_marks {
            flags |= FLAG_STRIP_MARKS;
        }
        if self.analyzer.stoplist.is_some() {
            flags |= FLAG_STOPLIST;
        }
        w.u32(flags)?;
        if let Some(list) = &self.analyzer.stoplist {
            w.str(list.name())?;
            w.u8(list.provenance().code())?;
            w.len(list.len())?;
            for word in list.words() {
                w.str(word)?;
            }
        }
        w.u64(self.removed_tokens)?;
        w.len(self.docnos.len())?;
        for (docno, &len) in self.docnos.iter().zip(&self.doc_lengths) {
            w.str(docno)?;
            w.u32(len)?;
        }
        w.u64(self.total_tokens)?;
        w.len(self.terms.len())?;
        for (term, entry) in self.terms.iter().zip(&self.entries) {
            w.str(term)?;
            w.u64(entry.ctf)?;
            w.len(entry.postings.len())?;
            for p in &entry.postings {
                w.u32(p.doc)?;
                w.u32(p.tf)?;
            }
        }
        w.0.write_all(MAGIC)?;
        w.0.flush()?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory cannot fail");
        buf
    }

    /// Reads an index and checks its invariants.
    pub fn read_from<R: Read>(input: R) -> Result<Index> {
        let mut r = Reader(input);
        if &r.bytes::<8>()? != MAGIC {
            return Err(corrupt("not an index file (bad magic)"));
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(corrupt(format!(
                "unsupported format version {version} (expected {FORMAT_VERSION})"
            )));
        }
        let flags = r.u32()?;
        if flags & !(FLAG_STRIP_MARKS | FLAG_STOPLIST) != 0 {
            return Err(corrupt(format!("unknown flags {flags:#x}")));
        }
        let stoplist = if flags & FLAG_STOPLIST != 0 {
            let name = r.str()?;
            let provenance = Provenance::from_code(r.u8()?).ok_or_else(|| corrupt("unknown stoplist provenance"))?;
            let count = r.u32()?;
            let mut words = std::collections::BTreeSet::new();
            for _ in 0..count {
                words.insert(r.str()?);
            }
            Some(Stoplist::from_normalized(name, provenance, words))
        } else {
            None
        };
        let analyzer = Analyzer::new(Normalizer::new(flags & FLAG_STRIP_MARKS != 0), stoplist);
        let removed_tokens = r.u64()?;

        let doc_count = r.u32()? as usize;
        let mut docnos = Vec::with_capacity(doc_count.min(1 << 20));
        let mut doc_lengths = Vec::with_capacity(doc_count.min(1 << 20));
        for _ in 0..doc_count {
            docnos.push(r.str()?);
            doc_lengths.push(r.u32()?);
        }
        let total_tokens = r.u64()?;

        let term_count = r.u32()? as usize;
        let mut terms = Vec::with_capacity(term_count.min(1 << 20));
        let mut entries = Vec::with_capacity(term_count.min(1 << 20));
        for _ in 0..term_count {
            terms.push(r.str()?);
            let ctf = r.u64()?;
            let df = r.u32()? as usize;
            let mut postings = Vec::with_capacity(df.min(doc_count));
            for _ in 0..df {
                let doc = r.u32()?;
                let tf = r.u32()?;
                postings.push(Posting { doc, tf });
            }
            entries.push(TermEntry { ctf, postings });
        }
        if &r.bytes::<8>()? != MAGIC {
            return Err(corrupt("missing trailer"));
        }

        let index = Index {
            analyzer,
            removed_tokens,
            docnos,
            doc_lengths,
            total_tokens,
            terms,
            entries,
        };
        if index.docnos.iter().collect::<std::collections::HashSet<_>>().len() != doc_count {
            return Err(corrupt("duplicate document numbers"));
        }
        index.check_invariants()?;
        Ok(index)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Index> {
        Index::read_from(BufReader::new(File::open(path)?))
    }
}
