//! Seeded synthetic test collection: Arabic-script newswire-like documents,
//! TREC topics and qrels.
//!
//! Tokens are drawn from two Zipfian pools, the bundled stopwords and a
//! generated background vocabulary. Each topic owns a handful of
//! mid-frequency words that are planted in its relevant documents and,
//! sparsely, in some non-relevant ones. Topic descriptions are padded with
//! stopwords so stoplist choice affects the queries too.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use arir::index::RawDocument;
use arir::Stoplist;
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::topics::Topic;

const LETTERS: &[char] = &[
    'ا', 'ب', 'ت', 'ث', 'ج', 'ح', 'خ', 'د', 'ذ', 'ر', 'ز', 'س', 'ش', 'ص', 'ض', 'ط', 'ظ', 'ع', 'غ', 'ف', 'ق', 'ك', 'ل',
    'م', 'ن', 'ه', 'و', 'ي',
];

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub docs: usize,
    pub queries: usize,
    pub seed: u64,
    pub vocabulary: usize,
    /// Inclusive token-count range per document.
    pub doc_len: (usize, usize),
    /// Share of tokens drawn from the stopword pool.
    pub stopword_rate: f64,
    pub topic_words: usize,
    /// Inclusive range of relevant documents per topic.
    pub relevant: (usize, usize),
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            docs: 5000,
            queries: 20,
            seed: 1,
            vocabulary: 8000,
            doc_len: (60, 180),
            stopword_rate: 0.35,
            topic_words: 4,
            relevant: (8, 30),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Judgment {
    pub qid: String,
    pub docno: String,
    pub relevant: bool,
}

#[derive(Debug, Clone)]
pub struct SynthCollection {
    pub docs: Vec<RawDocument>,
    pub topics: Vec<Topic>,
    pub qrels: Vec<Judgment>,
}

fn zipf(n: usize, s: f64) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|r| 1.0 / (r as f64).powf(s))).expect("non-empty pool")
}

fn background_vocabulary(rng: &mut ChaCha8Rng, n: usize, avoid: &Stoplist) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    let mut words = Vec::with_capacity(n);
    while words.len() < n {
        let len = rng.gen_range(3..=7);
        let w: String = (0..len).map(|_| *LETTERS.choose(rng).unwrap()).collect();
        if !avoid.contains(&w) && seen.insert(w.clone()) {
            words.push(w);
        }
    }
    words
}

pub fn generate(cfg: &SynthConfig) -> SynthCollection {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let stop = Stoplist::combined();
    let stopwords: Vec<&String> = stop.words().iter().collect();
    let stop_dist = zipf(stopwords.len(), 1.1);
    let vocab = background_vocabulary(&mut rng, cfg.vocabulary, &stop);
    let vocab_dist = zipf(vocab.len(), 1.0);

    let mut bodies: Vec<Vec<&str>> = (0..cfg.docs)
        .map(|_| {
            let len = rng.gen_range(cfg.doc_len.0..=cfg.doc_len.1);
            (0..len)
                .map(|_| {
                    if rng.gen_bool(cfg.stopword_rate) {
                        stopwords[stop_dist.sample(&mut rng)].as_str()
                    } else {
                        vocab[vocab_dist.sample(&mut rng)].as_str()
                    }
                })
                .collect()
        })
        .collect();
    let docno = |i: usize| format!("SYN{:06}", i + 1);

    // Topic words come from the middle of the frequency range, disjoint across topics.
    let mid = vocab.len() / 10..vocab.len() / 2;
    let mut pool: Vec<usize> = mid.choose_multiple(&mut rng, cfg.queries * cfg.topic_words);
    pool.shuffle(&mut rng);

    let mut topics = Vec::with_capacity(cfg.queries);
    let mut qrels = Vec::new();
    for q in 0..cfg.queries {
        let qid = (q + 1).to_string();
        let words: Vec<&str> = pool[q * cfg.topic_words..(q + 1) * cfg.topic_words]
            .iter()
            .map(|&i| vocab[i].as_str())
            .collect();
        let n_rel = rng.gen_range(cfg.relevant.0..=cfg.relevant.1).min(cfg.docs);
        let relevant = (0..cfg.docs).choose_multiple(&mut rng, n_rel);
        for &d in &relevant {
            for &w in &words {
                if rng.gen_bool(0.7) {
                    for _ in 0..rng.gen_range(1..=4) {
                        let at = rng.gen_range(0..=bodies[d].len());
                        bodies[d].insert(at, w);
                    }
                }
            }
            qrels.push(Judgment {
                qid: qid.clone(),
                docno: docno(d),
                relevant: true,
            });
        }
        let decoys = (0..cfg.docs).choose_multiple(&mut rng, (3 * n_rel).min(cfg.docs));
        for d in decoys {
            if relevant.contains(&d) {
                continue;
            }
            let at = rng.gen_range(0..=bodies[d].len());
            bodies[d].insert(at, words.choose(&mut rng).unwrap());
            qrels.push(Judgment {
                qid: qid.clone(),
                docno: docno(d),
                relevant: false,
            });
        }

        let mut sw = || stopwords[stop_dist.sample(&mut rng)].as_str();
        let title = format!("{} {}", words[0], words[1 % words.len()]);
        let mut desc: Vec<&str> = vec![sw(), sw()];
        for &w in &words {
            desc.push(w);
            desc.push(sw());
        }
        topics.push(Topic {
            qid,
            title,
            description: desc.join(" "),
        });
    }

    let docs = bodies
        .iter()
        .enumerate()
        .map(|(i, body)| {
            // wrap lines at 12 tokens for readable SGML
            let text = body.chunks(12).map(|c| c.join(" ")).collect::<Vec<_>>().join("\n");
            RawDocument::new(docno(i), text)
        })
        .collect();
    qrels.sort_by(|a, b| {
        let key = |j: &Judgment| (j.qid.parse::<usize>().unwrap_or(usize::MAX), j.docno.clone());
        key(a).cmp(&key(b))
    });
    SynthCollection { docs, topics, qrels }
}

impl SynthCollection {
    pub fn sgml(&self) -> String {
        let mut out = String::new();
        for d in &self.docs {
            let _ = write!(
                out,
                "<DOC>\n<DOCNO>{}</DOCNO>\n<TEXT>\n{}\n</TEXT>\n</DOC>\n",
                d.docno, d.text
            );
        }
        out
    }

    pub fn topics_text(&self) -> String {
        let mut out = String::new();
        for t in &self.topics {
            let _ = write!(
                out,
                "<top>\n<num> Number: {}\n<title> {}\n\n<desc> Description:\n{}\n\n</top>\n\n",
                t.qid, t.title, t.description
            );
        }
        out
    }

    pub fn qrels_text(&self) -> String {
        let mut out = String::new();
        for j in &self.qrels {
            let _ = writeln!(out, "{} 0 {} {}", j.qid, j.docno, u8::from(j.relevant));
        }
        out
    }

    /// Writes `corpus.sgml`, `topics.txt` and `qrels.txt` into `dir`.
    pub fn write_to(&self, dir: &Path) -> io::Result<SynthPaths> {
        std::fs::create_dir_all(dir)?;
        let paths = SynthPaths {
            corpus: dir.join("corpus.sgml"),
            topics: dir.join("topics.txt"),
            qrels: dir.join("qrels.txt"),
        };
        std::fs::write(&paths.corpus, self.sgml())?;
        std::fs::write(&paths.topics, self.topics_text())?;
        std::fs::write(&paths.qrels, self.qrels_text())?;
        Ok(paths)
    }
}

#[derive(Debug, Clone)]
pub struct SynthPaths {
    pub corpus: PathBuf,
    pub topics: PathBuf,
    pub qrels: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topics::parse_topics;
    use arir::index::parse_trec_documents;

    fn small() -> SynthConfig {
        SynthConfig {
            docs: 200,
            queries: 5,
            vocabulary: 500,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn same_seed_same_collection() {
        let a = generate(&small());
        let b = generate(&small());
        assert_eq!(a.sgml(), b.sgml());
        assert_eq!(a.qrels_text(), b.qrels_text());
        let c = generate(&SynthConfig { seed: 2, ..small() });
        assert_ne!(a.sgml(), c.sgml());
    }

    #[test]
    fn files_parse_back() {
        let s = generate(&small());
        let docs = parse_trec_documents(&s.sgml()).unwrap();
        assert_eq!(docs.len(), s.docs.len());
        for (got, want) in docs.iter().zip(&s.docs) {
            assert_eq!(
                (got.docno.as_str(), got.text.trim()),
                (want.docno.as_str(), want.text.as_str())
            );
        }
        let topics = parse_topics(&s.topics_text()).unwrap();
        assert_eq!(topics, s.topics);
        let qrels = arir::treceval::parse_qrels(s.qrels_text().as_bytes()).unwrap();
        assert_eq!(qrels.num_queries(), 5);
        assert!(qrels.qids().all(|q| !qrels.relevant(q).unwrap().is_empty()));
    }
}
