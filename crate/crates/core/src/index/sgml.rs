//! TIPSTER-style SGML document streams.
//!
//! A stream holds zero or more `<DOC>...</DOC>` blocks. Each block carries one
//! `<DOCNO>` and any number of `<TEXT>` regions; other elements (headers,
//! headlines, trailers) are ignored. Markup left inside a text region is
//! replaced by a space. Tags are matched case-sensitively.

use crate::error::{Error, Result};

/// A document as it appears in the corpus, before analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub docno: String,
    pub text: String,
}

impl RawDocument {
    pub fn new(docno: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            docno: docno.into(),
            text: text.into(),
        }
    }
}

fn sgml_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Sgml {
        offset,
        message: message.into(),
    }
}

/// Extracts `(docno, text)` records in stream order.
pub fn parse_trec_documents(stream: &str) -> Result<Vec<RawDocument>> {
    let mut docs = Vec::new();
    let mut pos = 0;
    while let Some(rel) = stream[pos..].find("<DOC>") {
        let start = pos + rel;
        let body_start = start + "<DOC>".len();
        let body_len = stream[body_start..]
            .find("</DOC>")
            .ok_or_else(|| sgml_err(start, "unterminated <DOC> block"))?;
        let body = &stream[body_start..body_start + body_len];
        if let Some(nested) = body.find("<DOC>") {
            return Err(sgml_err(
                body_start + nested,
                "<DOC> opened before the previous block was closed",
            ));
        }
        docs.push(parse_block(body, body_start, start)?);
        pos = body_start + body_len + "</DOC>".len();
    }
    Ok(docs)
}

fn parse_block(body: &str, base: usize, doc_offset: usize) -> Result<RawDocument> {
    let (docno, _) = region(body, "<DOCNO>", "</DOCNO>", 0)
        .ok_or_else(|| sgml_err(doc_offset, "<DOC> without <DOCNO>"))?
        .map_err(|at| sgml_err(base + at, "unterminated <DOCNO>"))?;
    let docno = docno.trim();
    if docno.is_empty() {
        return Err(sgml_err(doc_offset, "empty <DOCNO>"));
    }

    let mut text = String::new();
    let mut pos = 0;
    while let Some(found) = region(body, "<TEXT>", "</TEXT>", pos) {
        let (content, end) = found.map_err(|at| sgml_err(base + at, "unterminated <TEXT>"))?;
        if !text.is_empty() {
            text.push('\n');
        }
        strip_markup_into(content, &mut text);
        pos = end;
    }
    Ok(RawDocument::new(docno, text))
}

/// Finds the next `open ... close` region at or after `from`. Returns the
/// content and the offset just past `close`, or `Err(offset of open)` when
/// the region is not closed.
fn region<'a>(
    body: &'a str,
    open: &str,
    close: &str,
    from: usize,
) -> Option<std::result::Result<(&'a str, usize), usize>> {
    let start = from + body[from..].find(open)?;
    let content_start = start + open.len();
    Some(match body[content_start..].find(close) {
        Some(len) => Ok((
            &body[content_start..content_start + len],
            content_start + len + close.len(),
        )),
        None => Err(start),
    })
}

fn strip_markup_into(content: &str, out: &mut String) {
    let mut rest = content;
    while let Some(lt) = rest.find('<') {
        out.push_str(&rest[..lt]);
        match rest[lt..].find('>') {
            Some(gt) => {
                out.push(' ');
                rest = &rest[lt + gt + 1..];
            }
            None => {
                out.push_str(&rest[lt..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
}
