//! Externally produced inputs to the filter pipeline: crawl results and
//! domain flag sets. Both are consumed as files; nothing here crawls or
//! classifies.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::digest::Digest;

#[derive(Debug, thiserror::Error)]
pub enum InputFileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("crawl file: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
}

/// Lowercased name with surrounding whitespace and one trailing dot removed.
pub(crate) fn normalize_name(raw: &str) -> String {
    let t = raw.trim();
    t.strip_suffix('.').unwrap_or(t).to_ascii_lowercase()
}

fn read(path: &Path) -> Result<Vec<u8>, InputFileError> {
    std::fs::read(path).map_err(|source| InputFileError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrawlResult {
    pub domain: String,
    pub reachable: bool,
    pub status: Option<u16>,
    pub body_bytes: Option<u64>,
}

/// Crawl results keyed by domain name.
#[derive(Debug, Clone, Default)]
pub struct CrawlIndex {
    results: HashMap<String, CrawlResult>,
    source_digest: Option<Digest>,
}

impl CrawlIndex {
    pub fn from_results(results: impl IntoIterator<Item = CrawlResult>) -> Self {
        CrawlIndex {
            results: results.into_iter().map(|r| (r.domain.clone(), r)).collect(),
            source_digest: None,
        }
    }

    /// Parses `domain,reachable,status,body_bytes` CSV with a header row.
    /// `status` and `body_bytes` may be empty.
    pub fn parse(bytes: &[u8]) -> Result<Self, InputFileError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
        let headers = reader.headers()?.clone();
        let column = |name: &str| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .ok_or_else(|| InputFileError::Row {
                    line: 1,
                    message: format!("missing column {name}"),
                })
        };
        let cols = [
            column("domain")?,
            column("reachable")?,
            column("status")?,
            column("body_bytes")?,
        ];

        let mut results = HashMap::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let bad = |message: String| InputFileError::Row { line, message };
            let field = |i: usize| record.get(cols[i]).unwrap_or("");

            let domain = normalize_name(field(0));
            if domain.is_empty() {
                return Err(bad("empty domain".into()));
            }
            let reachable = match field(1).to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => true,
                "false" | "0" | "no" => false,
                other => return Err(bad(format!("bad reachable value {other:?}"))),
            };
            let status = match field(2) {
                "" => None,
                s => Some(s.parse::<u16>().map_err(|_| bad(format!("bad status {s:?}")))?),
            };
            let body_bytes = match field(3) {
                "" => None,
                s => Some(s.parse::<u64>().map_err(|_| bad(format!("bad body_bytes {s:?}")))?),
            };
            if status.is_some() && !reachable {
                return Err(bad(format!("{domain} has a status but is unreachable")));
            }
            let result = CrawlResult {
                domain: domain.clone(),
                reachable,
                status,
                body_bytes,
            };
            if results.insert(domain.clone(), result).is_some() {
                return Err(bad(format!("duplicate row for {domain}")));
            }
        }
        Ok(CrawlIndex {
            results,
            source_digest: Some(Digest::of(bytes)),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, InputFileError> {
        Self::parse(&read(path)?)
    }

    pub fn get(&self, domain: &str) -> Option<&CrawlResult> {
        self.results.get(domain)
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }

    /// Digest of the parsed file; `None` when built from values.
    pub fn source_digest(&self) -> Option<Digest> {
        self.source_digest
    }
}

/// A labelled set of domain names, such as one Safe Browsing category or
/// a popular-destinations list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagSet {
    pub label: String,
    pub domains: HashSet<String>,
    pub source_digest: Digest,
}

impl FlagSet {
    /// One domain per line; blank lines and lines starting with `#` are
    /// skipped.
    pub fn parse(label: impl Into<String>, bytes: &[u8]) -> Result<Self, InputFileError> {
        let text = std::str::from_utf8(bytes).map_err(|e| InputFileError::Row {
            line: 0,
            message: format!("not UTF-8: {e}"),
        })?;
        let domains = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(normalize_name)
            .collect();
        Ok(FlagSet {
            label: label.into(),
            domains,
            source_digest: Digest::of(bytes),
        })
    }

    pub fn from_file(label: impl Into<String>, path: &Path) -> Result<Self, InputFileError> {
        Self::parse(label, &read(path)?)
    }

    /// A set built from values; its digest covers the sorted names.
    pub fn from_names<S: AsRef<str>>(label: impl Into<String>, names: impl IntoIterator<Item = S>) -> Self {
        let domains: HashSet<String> = names.into_iter().map(|n| normalize_name(n.as_ref())).collect();
        let mut sorted: Vec<&str> = domains.iter().map(String::as_str).collect();
        sorted.sort_unstable();
        let source_digest = Digest::of(sorted.join("\n").as_bytes());
        FlagSet {
            label: label.into(),
            domains,
            source_digest,
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.domains.contains(name)
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }
}
