//! TREC topic files: `<top>` blocks with `<num>`, `<title>`, `<desc>` and
//! optional `<narr>` fields. Field text runs until the next tag.

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topic {
    pub qid: String,
    pub title: String,
    pub description: String,
}

impl Topic {
    /// Title followed by description.
    pub fn query_text(&self) -> String {
        match (self.title.is_empty(), self.description.is_empty()) {
            (_, true) => self.title.clone(),
            (true, false) => self.description.clone(),
            (false, false) => format!("{} {}", self.title, self.description),
        }
    }
}

fn find_ci(hay: &str, needle: &str, from: usize) -> Option<usize> {
    hay.get(from..)?.to_ascii_lowercase().find(needle).map(|i| i + from)
}

/// Text of field `<tag>` inside a topic block, without any `Label:` prefix.
fn field(block: &str, tag: &str, label: &str) -> Option<String> {
    let lower = block.to_ascii_lowercase();
    let open = format!("<{tag}");
    let start = lower.find(&open)?;
    let body_start = start + lower[start..].find('>')? + 1;
    let body_end = lower[body_start..].find('<').map_or(block.len(), |i| body_start + i);
    let mut text = block[body_start..body_end].trim();
    if text.len() >= label.len() && text[..label.len()].eq_ignore_ascii_case(label) {
        text = text[label.len()..].trim_start();
    }
    Some(text.split_whitespace().collect::<Vec<_>>().join(" "))
}

pub fn parse_topics(text: &str) -> Result<Vec<Topic>> {
    let mut topics = Vec::new();
    let mut pos = 0;
    while let Some(start) = find_ci(text, "<top", pos) {
        let end = find_ci(text, "</top>", start)
            .ok_or_else(|| CliError::Data(format!("unterminated <top> at byte {start}")))?;
        let block = &text[start..end];
        let qid = field(block, "num", "Number:")
            .filter(|q| !q.is_empty())
            .ok_or_else(|| CliError::Data(format!("topic at byte {start} has no <num>")))?;
        topics.push(Topic {
            qid,
            title: field(block, "title", "Title:").unwrap_or_default(),
            description: field(block, "desc", "Description:").unwrap_or_default(),
        });
        pos = end + "</top>".len();
    }
    let mut seen = std::collections::HashSet::new();
    for t in &topics {
        if !seen.insert(&t.qid) {
            return Err(CliError::Data(format!("topic {} appears twice", t.qid)));
        }
    }
    Ok(topics)
}
