//! Public-suffix rules in the standard one-rule-per-line format.
//!
//! Rules are loaded from a local file and pinned by the digest of that
//! file, so a combined list can record exactly which suffix vintage its
//! PLD-dependent filters used. Matching follows the usual algorithm:
//! exception rules (`!`) win, otherwise the longest matching rule (plain or
//! `*.` wildcard) wins, and an unlisted TLD falls back to the implicit `*`
//! rule.

use std::collections::HashSet;
use std::path::Path;

use crate::digest::Digest;

const BUILTIN_RULES: &str = include_str!("../data/public_suffix_builtin.dat");

#[derive(Debug, Clone)]
pub struct PublicSuffixRules {
    exact: HashSet<String>,
    /// Parents of `*.` rules: `*.ck` is stored as `ck`.
    wildcard: HashSet<String>,
    /// Exception rules without the leading `!`.
    exception: HashSet<String>,
    source_digest: Digest,
}

impl PublicSuffixRules {
    pub fn parse(text: &str) -> Self {
        let mut exact = HashSet::new();
        let mut wildcard = HashSet::new();
        let mut exception = HashSet::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with("//") {
                continue;
            }
            // only the first whitespace-delimited token is the rule
            let rule = line.split_whitespace().next().unwrap_or_default();
            let rule = rule.trim_end_matches('.').to_lowercase();
            if let Some(rest) = rule.strip_prefix('!') {
                exception.insert(rest.to_string());
            } else if let Some(rest) = rule.strip_prefix("*.") {
                wildcard.insert(rest.to_string());
            } else {
                exact.insert(rule);
            }
        }
        PublicSuffixRules {
            exact,
            wildcard,
            exception,
            source_digest: Digest::of(text.as_bytes()),
        }
    }

    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        let bytes = std::fs::read(path)?;
        let text = String::from_utf8(bytes).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        Ok(Self::parse(&text))
    }

    /// The compact rule set compiled into the binary. Covers the generic
    /// TLDs and the common multi-label country suffixes; load the full
    /// upstream file for research runs.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_RULES)
    }

    pub fn source_digest(&self) -> Digest {
        self.source_digest
    }

    pub fn len(&self) -> usize {
        self.exact.len() + self.wildcard.len() + self.exception.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of trailing labels of `name` that form its public suffix.
    /// `name` must already be lowercased and dot-separated with no empty
    /// labels. Always returns at least 1.
    pub fn suffix_label_count(&self, name: &str) -> usize {
        let starts = label_starts(name);
        let n = starts.len();

        for (i, &start) in starts.iter().enumerate() {
            if self.exception.contains(&name[start..]) {
                return n - i - 1;
            }
        }
        for (i, &start) in starts.iter().enumerate() {
            if self.exact.contains(&name[start..]) {
                return n - i;
            }
            if let Some(&parent) = starts.get(i + 1) {
                if self.wildcard.contains(&name[parent..]) {
                    return n - i;
                }
            }
        }
        1
    }

    /// The effective TLD of `name` (same preconditions as
    /// [`suffix_label_count`](Self::suffix_label_count)).
    pub fn public_suffix<'a>(&self, name: &'a str) -> &'a str {
        let count = self.suffix_label_count(name);
        let starts = label_starts(name);
        &name[starts[starts.len() - count.min(starts.len())]..]
    }
}

fn label_starts(name: &str) -> Vec<usize> {
    std::iter::once(0)
        .chain(name.match_indices('.').map(|(i, _)| i + 1))
        .collect()
}
