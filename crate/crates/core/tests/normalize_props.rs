use arir::stoplists::filter_tokens;
use arir::textpipe::{normalize, tokenize, Normalizer};
use arir::Stoplist;
use proptest::prelude::*;
use std::sync::OnceLock;

fn combined() -> &'static Stoplist {
    static LIST: OnceLock<Stoplist> = OnceLock::new();
    LIST.get_or_init(Stoplist::combined)
}

/// Arabic block and presentation forms, Latin, digits, whitespace,
/// punctuation, plus arbitrary scalar values.
fn text() -> impl Strategy<Value = String> {
    let ch = prop_oneof![
        4 => proptest::char::range('\u{0600}', '\u{06FF}'),
        1 => proptest::char::range('\u{FB50}', '\u{FDFF}'),
        1 => proptest::char::range('\u{FE70}', '\u{FEFF}'),
        2 => prop::sample::select(vec!['أ', 'إ', 'آ', 'ى', 'ة', 'ـ', '\u{064E}', '\u{0651}', ' ', '\n', '.', '،']),
        1 => proptest::char::range('a', 'z'),
        1 => proptest::char::range('0', '9'),
        1 => any::<char>(),
    ];
    prop::collection::vec(ch, 0..64).prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn normalization_is_idempotent(s in text()) {
        let once = normalize(&s);
        prop_assert_eq!(normalize(&once), once.clone());
        let keep = Normalizer::new(false);
        let kept = keep.normalize(&s);
        prop_assert_eq!(keep.normalize(&kept), kept);
    }

    #[test]
    fn stopword_filtering_is_idempotent(s in text()) {
        let gs = combined();
        let toks: Vec<String> = tokenize(&normalize(&s)).into_iter().map(|t| t.into_string()).collect();
        let once = filter_tokens(toks, gs);
        prop_assert!(once.iter().all(|t| !gs.contains(t)));
        prop_assert_eq!(filter_tokens(once.clone(), gs), once);
    }
}
