//! Provider list parsers and the dated on-disk snapshot archive.

mod archive;
mod parsers;

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;

use crate::snapshot::Provider;

pub(crate) use archive::WriterLock;
pub use archive::{ArchiveError, ArchiveStore, IndexEntry, PutStatus};
pub use parsers::{
    parse_alexa_umbrella_csv, parse_canonical_csv, parse_majestic_csv, parse_provider_file, parse_quantcast,
    HIDDEN_PROFILE_MARKER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DropReason {
    MalformedDomain,
    HiddenProfile,
    Duplicate,
    BadRank,
}

impl DropReason {
    pub const ALL: [DropReason; 4] = [
        DropReason::MalformedDomain,
        DropReason::HiddenProfile,
        DropReason::Duplicate,
        DropReason::BadRank,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::MalformedDomain => "malformed-domain",
            DropReason::HiddenProfile => "hidden-profile",
            DropReason::Duplicate => "duplicate",
            DropReason::BadRank => "bad-rank",
        }
    }
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-file accounting of what a parser kept and why it dropped lines.
///
/// `accepted + dropped()` equals the number of data lines; comments,
/// headers and blank lines are not data lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseReport {
    pub provider: Provider,
    pub date: NaiveDate,
    pub accepted: usize,
    pub drops: BTreeMap<DropReason, usize>,
    /// Lines whose published rank was not the previous published rank plus
    /// one. Entries are re-ranked densely in file order regardless.
    pub rank_gaps: usize,
}

impl ParseReport {
    pub(crate) fn new(provider: Provider, date: NaiveDate) -> Self {
        ParseReport {
            provider,
            date,
            accepted: 0,
            drops: BTreeMap::new(),
            rank_gaps: 0,
        }
    }

    pub fn dropped(&self) -> usize {
        self.drops.values().sum()
    }

    pub fn dropped_for(&self, reason: DropReason) -> usize {
        self.drops.get(&reason).copied().unwrap_or(0)
    }

    pub fn data_lines(&self) -> usize {
        self.accepted + self.dropped()
    }

    pub(crate) fn drop_line(&mut self, reason: DropReason) {
        *self.drops.entry(reason).or_default() += 1;
    }
}

impl fmt::Display for ParseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "accepted={} dropped={}", self.accepted, self.dropped())?;
        for (reason, n) in &self.drops {
            write!(f, " {reason}={n}")?;
        }
        if self.rank_gaps > 0 {
            write!(f, " rank-gaps={}", self.rank_gaps)?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("missing required column {0:?}")]
    MissingColumn(&'static str),
    #[error("empty input: expected a header line")]
    MissingHeader,
    #[error("unreadable CSV: {0}")]
    Csv(#[from] csv::Error),
}
