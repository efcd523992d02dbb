//! Experiment manifests: plain `key = value` lines, `#` comments. Keys use the
//! long flag names (`top-k` and `top_k` are the same key). Command-line flags
//! take precedence over manifest values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    values: BTreeMap<String, String>,
    /// Directory of the manifest file; relative paths resolve against it.
    base: PathBuf,
}

fn canonical_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

impl Manifest {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Format {
                path: path.to_owned(),
                line: i + 1,
                message: "expected `key = value`".into(),
            })?;
            values.insert(canonical_key(key), value.trim().to_owned());
        }
        Ok(Self {
            values,
            base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
        Self::parse(&text, path)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(&canonical_key(key)).map(String::as_str)
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|e| CliError::usage(format!("config key `{key}`: invalid value `{v}`: {e}")))
            })
            .transpose()
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(|v| self.base.join(v))
    }

    /// Whitespace- or comma-separated list of paths.
    pub fn paths(&self, key: &str) -> Vec<PathBuf> {
        self.get(key)
            .map(|v| {
                v.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| self.base.join(s))
                    .collect()
            })
            .unwrap_or_default()
    }
}

/// `flag` if given, otherwise the manifest value.
pub fn pick<T>(flag: Option<T>, manifest: Option<T>) -> Option<T> {
    flag.or(manifest)
}

pub fn require<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| CliError::usage(format!("missing required option --{name}")))
}

pub fn existing(path: PathBuf) -> Result<PathBuf> {
    if path.exists() {
        Ok(path)
    } else {
        Err(CliError::Data(format!("{}: no such file or directory", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_resolves_paths() {
        let text = "# experiment\nmodel = BM25\ntop_k=500\ncorpus = a.sgml, b.sgml\n";
        let m = Manifest::parse(text, Path::new("/exp/run.conf")).unwrap();
        assert_eq!(m.get("model"), Some("BM25"));
        assert_eq!(m.parsed::<usize>("top-k").unwrap(), Some(500));
        assert_eq!(
            m.paths("corpus"),
            [PathBuf::from("/exp/a.sgml"), PathBuf::from("/exp/b.sgml")]
        );
        assert_eq!(pick(Some(3), m.parsed::<usize>("top-k").unwrap()), Some(3));
    }

    #[test]
    fn bad_lines_and_values() {
        assert!(Manifest::parse("model BM25", Path::new("c")).is_err());
        let m = Manifest::parse("top-k = many", Path::new("c")).unwrap();
        assert!(matches!(m.parsed::<usize>("top-k"), Err(CliError::Usage(_))));
    }
}
