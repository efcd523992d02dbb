//! Light orthographic normalization and tokenization for Arabic text.
//!
//! Normalization folds the hamza-carrying alef forms to bare alef, rewrites
//! word-final alef maqsura as yeh and word-final teh marbuta as heh, and by
//! default strips harakat (U+064B..=U+0652) and tatweel. No stemming is done.
//!
//! Tokens are maximal runs of Arabic letters, or maximal runs of Latin
//! letters and digits. Everything else separates tokens.

use std::borrow::Borrow;
use std::fmt;
use std::ops::Deref;

const ALEF: char = '\u{0627}';
const ALEF_MADDA: char = '\u{0622}';
const ALEF_HAMZA_ABOVE: char = '\u{0623}';
const ALEF_HAMZA_BELOW: char = '\u{0625}';
const ALEF_MAQSURA: char = '\u{0649}';
const YEH: char = '\u{064A}';
const TEH_MARBUTA: char = '\u{0629}';
const HEH: char = '\u{0647}';
const TATWEEL: char = '\u{0640}';

/// Fathatan through sukun.
#[inline]
pub fn is_haraka(c: char) -> bool {
    ('\u{064B}'..='\u{0652}').contains(&c)
}

#[inline]
fn in_arabic_block(c: char) -> bool {
    matches!(c,
        '\u{0600}'..='\u{06FF}'
        | '\u{0750}'..='\u{077F}'
        | '\u{08A0}'..='\u{08FF}'
        | '\u{FB50}'..='\u{FDFF}'
        | '\u{FE70}'..='\u{FEFF}')
}

#[inline]
fn is_arabic_mark(c: char) -> bool {
    matches!(c,
        '\u{0610}'..='\u{061A}'
        | '\u{064B}'..='\u{065F}'
        | '\u{0670}'
        | '\u{06D6}'..='\u{06DC}'
        | '\u{06DF}'..='\u{06E4}'
        | '\u{06E7}'..='\u{06E8}'
        | '\u{06EA}'..='\u{06ED}'
        | '\u{08D3}'..='\u{08FF}')
}

/// A character that belongs to an Arabic word: letters, tatweel and combining marks.
#[inline]
pub fn is_arabic_letter(c: char) -> bool {
    in_arabic_block(c) && (c.is_alphabetic() || is_arabic_mark(c))
}

#[inline]
fn is_digit(c: char) -> bool {
    c.is_ascii_digit() || ('\u{0660}'..='\u{0669}').contains(&c) || ('\u{06F0}'..='\u{06F9}').contains(&c)
}

/// Latin letters (basic, Latin-1, Extended-A/B and Additional) and decimal digits.
#[inline]
pub fn is_latin_alnum(c: char) -> bool {
    c.is_ascii_alphanumeric()
        || is_digit(c)
        || (matches!(c, '\u{00C0}'..='\u{024F}' | '\u{1E00}'..='\u{1EFF}') && c.is_alphabetic())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Arabic,
    LatinAlnum,
    Separator,
}

#[inline]
fn classify(c: char) -> Class {
    if is_arabic_letter(c) {
        Class::Arabic
    } else if is_latin_alnum(c) {
        Class::LatinAlnum
    } else {
        Class::Separator
    }
}

/// Character folding table applied identically to documents, queries and
/// stoplist entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Normalizer {
    /// Remove harakat and tatweel before folding.
    pub strip_marks: bool,
}

impl Default for Normalizer {
    fn default() -> Self {
        Self { strip_marks: true }
    }
}

impl Normalizer {
    pub fn new(strip_marks: bool) -> Self {
        Self { strip_marks }
    }

    #[inline]
    fn is_stripped(&self, c: char) -> bool {
        self.strip_marks && (is_haraka(c) || c == TATWEEL)
    }

    /// Marks and tatweel do not end a word when they are kept.
    #[inline]
    fn is_transparent(c: char) -> bool {
        is_haraka(c) || c == TATWEEL
    }

    pub fn normalize(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        self.normalize_into(text, &mut out);
        out
    }

    /// Appends the normalized form of `text` to `out`.
    pub fn normalize_into(&self, text: &str, out: &mut String) {
        let chars: Vec<char> = text.chars().filter(|&c| !self.is_stripped(c)).collect();
        for (i, &c) in chars.iter().enumerate() {
            let folded = match c {
                ALEF_MADDA | ALEF_HAMZA_ABOVE | ALEF_HAMZA_BELOW => ALEF,
                ALEF_MAQSURA if word_final(&chars, i) => YEH,
                TEH_MARBUTA if word_final(&chars, i) => HEH,
                c => c,
            };
            out.push(folded);
        }
    }

    /// Normalizes then tokenizes.
    pub fn analyze(&self, text: &str) -> Vec<Token> {
        tokenize(&self.normalize(text))
    }
}

fn word_final(chars: &[char], i: usize) -> bool {
    chars[i + 1..]
        .iter()
        .find(|&&c| !Normalizer::is_transparent(c))
        .is_none_or(|&c| !is_arabic_letter(c))
}

/// Normalizes with the default table (marks stripped).
pub fn normalize(text: &str) -> String {
    Normalizer::default().normalize(text)
}

/// A normalized, non-empty word form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl Deref for Token {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Token {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Iterator over token slices of already-normalized text.
#[derive(Debug, Clone)]
pub struct Tokens<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Iterator for Tokens<'a> {
    type Item = &'a str;

    fn next(&mut self) -> Option<&'a str> {
        let rest = &self.text[self.pos..];
        let mut start = None;
        let mut class = Class::Separator;
        for (off, c) in rest.char_indices() {
            let cl = classify(c);
            match start {
                None if cl != Class::Separator => {
                    start = Some(off);
                    class = cl;
                }
                Some(s) if cl != class => {
                    self.pos += off;
                    return Some(&rest[s..off]);
                }
                _ => {}
            }
        }
        self.pos = self.text.len();
        start.map(|s| &rest[s..])
    }
}

/// Splits normalized text into token slices.
pub fn tokens(text: &str) -> Tokens<'_> {
    Tokens { text, pos: 0 }
}

pub fn tokenize(text: &str) -> Vec<Token> {
    tokens(text).map(|t| Token(t.to_owned())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hamza_alef_folds_to_bare_alef() {
        assert_eq!(normalize("أخبار"), "اخبار");
        assert_eq!(normalize("إلى آخر"), "الي اخر");
    }

    #[test]
    fn empty_and_untouched_text() {
        assert_eq!(normalize(""), "");
        assert_eq!(normalize("abc 123"), "abc 123");
    }

    #[test]
    fn final_forms_only_at_word_end() {
        // teh marbuta and alef maqsura are rewritten only word-finally
        assert_eq!(normalize("مدرسة"), "مدرسه");
        assert_eq!(normalize("مدرسة، كبيرة"), "مدرسه، كبيره");
        assert_eq!(normalize("على"), "علي");
        assert_eq!(normalize("ةا"), "ةا");
        assert_eq!(normalize("ىب"), "ىب");
        assert_eq!(normalize("مدرسة2"), "مدرسه2");
    }

    #[test]
    fn strips_harakat_and_tatweel() {
        assert_eq!(normalize("كُتَّاب"), "كتاب");
        assert_eq!(normalize("جمـــيل"), "جميل");
        // the mark between teh marbuta and the space does not hide word end
        assert_eq!(normalize("مدرسةٌ جديدة"), "مدرسه جديده");
    }

    #[test]
    fn kept_marks_are_transparent_for_word_end() {
        let n = Normalizer::new(false);
        assert_eq!(n.normalize("مدرسةٌ"), "مدرسهٌ");
        assert_eq!(n.normalize("أَ"), "اَ");
    }

    #[test]
    fn tokenize_examples() {
        let t: Vec<&str> = tokens("قال الوزير").collect();
        assert_eq!(t, ["قال", "الوزير"]);
        let t: Vec<&str> = tokens("TREC-2001").collect();
        assert_eq!(t, ["TREC", "2001"]);
        assert!(tokenize("   ").is_empty());
    }

    #[test]
    fn script_change_splits_tokens() {
        let t: Vec<&str> = tokens("abcقال x1y2، (وزير)").collect();
        assert_eq!(t, ["abc", "قال", "x1y2", "وزير"]);
        let t: Vec<&str> = tokens("عام ٢٠٠١م").collect();
        assert_eq!(t, ["عام", "٢٠٠١", "م"]);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC{0,40}") {
            let once = normalize(&s);
            prop_assert_eq!(normalize(&once), once.clone());
            prop_assert!(once.chars().count() <= s.chars().count());
        }

        #[test]
        fn arabic_heavy_idempotence(s in "[\u{0620}-\u{0655}\u{0640} a-z0-9.]{0,30}") {
            for strip in [true, false] {
                let n = Normalizer::new(strip);
                let once = n.normalize(&s);
                prop_assert_eq!(n.normalize(&once), once);
            }
        }

        #[test]
        fn tokens_are_nonempty_and_separator_free(s in "\\PC{0,40}") {
            let norm = normalize(&s);
            let toks = tokenize(&norm);
            for t in &toks {
                prop_assert!(!t.is_empty());
                prop_assert!(t.chars().all(|c| classify(c) != Class::Separator));
                prop_assert!(!t.chars().any(|c| c.is_whitespace() || is_haraka(c) || c == TATWEEL));
            }
            let joined = toks.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(" ");
            prop_assert_eq!(tokenize(&joined), toks);
        }
    }
}
