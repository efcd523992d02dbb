mod common;

use std::collections::BTreeMap;

use arir::index::{build_index, parse_trec_documents, IndexBuilder, RawDocument};
use arir::{Analyzer, Index, Normalizer, Provenance, Stoplist};
use common::{random_case, raw_tokens};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_sums(index: &Index) {
    let ctf_sum: u64 = index.iter_terms().map(|(_, e)| e.ctf).sum();
    let dl_sum: u64 = index.doc_lengths().iter().map(|&l| u64::from(l)).sum();
    assert_eq!(ctf_sum, index.total_tokens());
    assert_eq!(dl_sum, index.total_tokens());
    for (term, e) in index.iter_terms() {
        assert!(e.df() <= index.num_docs(), "{term}");
        assert!(e.df() as u64 <= e.ctf, "{term}");
        assert_eq!(e.postings.iter().map(|p| u64::from(p.tf)).sum::<u64>(), e.ctf);
        assert!(e.postings.windows(2).all(|w| w[0].doc < w[1].doc));
        assert!(e.postings.iter().all(|p| p.tf >= 1));
    }
}

#[test]
fn random_builds_hold_invariants_and_are_thread_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1D7);
    let max_threads = std::thread::available_parallelism().map_or(4, |n| n.get()).max(2);
    for _ in 0..50 {
        let case = random_case(&mut rng);
        let list = Stoplist::from_words("S", Provenance::Custom, &case.stopwords);
        for list in [None, Some(list)] {
            let analyzer = Analyzer::new(Normalizer::default(), list);
            let one = IndexBuilder::new(analyzer.clone())
                .threads(Some(1))
                .build(&case.docs)
                .unwrap();
            let many = IndexBuilder::new(analyzer)
                .threads(Some(max_threads))
                .build(&case.docs)
                .unwrap();
            check_sums(&one);
            assert_eq!(one.to_bytes(), many.to_bytes());
        }
    }
}

#[test]
fn stoplist_removal_equals_stopword_ctf() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2E8);
    for _ in 0..50 {
        let case = random_case(&mut rng);
        if case.stopwords.is_empty() {
            continue;
        }
        let list = Stoplist::from_words("S", Provenance::Custom, &case.stopwords);
        let plain = build_index(&case.docs, None).unwrap();
        let filtered = build_index(&case.docs, Some(&list)).unwrap();
        let expected: u64 = list.words().iter().map(|w| plain.ctf(w)).sum();
        assert_eq!(filtered.removed_tokens(), expected);
        assert_eq!(filtered.total_tokens() + expected, plain.total_tokens());
        assert_eq!(filtered.num_docs(), plain.num_docs());
    }
}

#[test]
fn postings_match_direct_token_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3F9);
    let case = random_case(&mut rng);
    let index = build_index(&case.docs, None).unwrap();
    for (ord, doc) in case.docs.iter().enumerate() {
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for t in raw_tokens(&doc.text) {
            *counts.entry(t).or_default() += 1;
        }
        for (term, tf) in counts {
            let entry = index.term(&term).unwrap();
            let p = entry.postings.iter().find(|p| p.doc as usize == ord).unwrap();
            assert_eq!(p.tf, tf);
        }
    }
}

#[test]
fn sgml_to_index_toy_counts() {
    let sgml = "<DOC>\n<DOCNO> D1 </DOCNO>\n<TEXT>\na b\n</TEXT>\n</DOC>\n\
                <DOC><DOCNO>D2</DOCNO><TEXT>b c</TEXT></DOC>\n\
                <DOC>\n<DOCNO>D3</DOCNO>\n<TEXT>c</TEXT>\n<TEXT>c</TEXT>\n</DOC>\n";
    let docs = parse_trec_documents(sgml).unwrap();
    assert_eq!(
        docs.iter().map(|d| d.docno.as_str()).collect::<Vec<_>>(),
        ["D1", "D2", "D3"]
    );
    let index = build_index(&docs, None).unwrap();
    assert_eq!(index.num_docs(), 3);
    assert_eq!(index.total_tokens(), 6);
    assert_eq!(index.avgdl(), 2.0);
    assert_eq!((index.df("a"), index.df("b"), index.ctf("c")), (1, 2, 3));

    let b = Stoplist::from_words("B", Provenance::Custom, ["b"]);
    let index = build_index(&docs, Some(&b)).unwrap();
    assert_eq!(index.doc_lengths(), [1, 1, 2]);
    assert_eq!(index.total_tokens(), 4);
    assert_eq!(index.removed_tokens(), 2);
    assert!(index.term("b").is_none());
}

#[test]
fn saved_index_round_trips_through_disk() {
    let docs: Vec<RawDocument> = (0..25)
        .map(|i| {
            RawDocument::new(
                format!("N{i}"),
                format!("في القاهرة قال {} الرئيس", "وزير ".repeat(i % 4)),
            )
        })
        .collect();
    let index = build_index(&docs, Some(&Stoplist::general())).unwrap();
    let dir = std::env::temp_dir().join(format!("arir-idx-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.idx");
    index.save(&path).unwrap();
    let back = Index::load(&path).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(back, index);
    assert_eq!(back.stoplist().unwrap().name(), "GS");
    assert!(back.removed_tokens() > 0);
}
