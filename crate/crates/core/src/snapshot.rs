use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::digest::{Digest, DigestWriter};
use crate::domain::DomainRecord;

/// The four ranking providers.
///
/// Declared in alphabetical order so the derived `Ord` matches the order
/// of the lowercase names used in every file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provider {
    Alexa,
    Majestic,
    Quantcast,
    Umbrella,
}

impl Provider {
    pub const ALL: [Provider; 4] = [
        Provider::Alexa,
        Provider::Majestic,
        Provider::Quantcast,
        Provider::Umbrella,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Provider::Alexa => "alexa",
            Provider::Majestic => "majestic",
            Provider::Quantcast => "quantcast",
            Provider::Umbrella => "umbrella",
        }
    }

    pub(crate) fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown provider {0:?} (expected alexa, majestic, quantcast or umbrella)")]
pub struct UnknownProvider(pub String);

impl FromStr for Provider {
    type Err = UnknownProvider;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Provider::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownProvider(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedEntry {
    pub rank: u32,
    pub domain: DomainRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvalidSnapshot {
    #[error("rank {found} at position {position}, expected {}", position + 1)]
    NonDenseRank { position: usize, found: u32 },
    #[error("duplicate domain {0}")]
    DuplicateDomain(String),
}

/// One provider's ranked list for one download date.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProviderSnapshot {
    provider: Provider,
    date: NaiveDate,
    entries: Vec<RankedEntry>,
    digest: Digest,
}

impl ProviderSnapshot {
    /// Validates dense 1-based ranks and uniqueness of names.
    pub fn new(provider: Provider, date: NaiveDate, entries: Vec<RankedEntry>) -> Result<Self, InvalidSnapshot> {
        let mut seen = HashSet::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if e.rank as usize != i + 1 {
                return Err(InvalidSnapshot::NonDenseRank {
                    position: i,
                    found: e.rank,
                });
            }
            if !seen.insert(e.domain.name()) {
                return Err(InvalidSnapshot::DuplicateDomain(e.domain.name().to_string()));
            }
        }
        let digest = snapshot_digest(&entries);
        Ok(ProviderSnapshot {
            provider,
            date,
            entries,
            digest,
        })
    }

    /// Builds a snapshot from domains in rank order, assigning ranks 1..n.
    pub fn from_ordered(
        provider: Provider,
        date: NaiveDate,
        domains: impl IntoIterator<Item = DomainRecord>,
    ) -> Result<Self, InvalidSnapshot> {
        let entries = domains
            .into_iter()
            .enumerate()
            .map(|(i, domain)| RankedEntry {
                rank: i as u32 + 1,
                domain,
            })
            .collect();
        Self::new(provider, date, entries)
    }

    pub fn provider(&self) -> Provider {
        self.provider
    }

    pub fn date(&self) -> NaiveDate {
        self.date
    }

    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn digest(&self) -> Digest {
        self.digest
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.iter().map(|e| e.domain.name())
    }

    pub fn domains(&self) -> impl Iterator<Item = &DomainRecord> + '_ {
        self.entries.iter().map(|e| &e.domain)
    }

    /// The canonical `rank,name` file form, one entry per line, each line
    /// newline-terminated.
    pub fn to_canonical_csv(&self) -> String {
        let mut out = String::with_capacity(self.entries.len() * 24);
        for e in &self.entries {
            out.push_str(&e.rank.to_string());
            out.push(',');
            out.push_str(e.domain.name());
            out.push('\n');
        }
        out
    }
}

/// Hash of the canonical serialization: `rank,name` lines joined by a
/// single `\n`, with no trailing newline.
pub fn snapshot_digest(entries: &[RankedEntry]) -> Digest {
    let mut w = DigestWriter::new();
    for (i, e) in entries.iter().enumerate() {
        if i > 0 {
            w.update(b"\n");
        }
        w.update(e.rank.to_string().as_bytes());
        w.update(b",");
        w.update(e.domain.name().as_bytes());
    }
    w.finish()
}
