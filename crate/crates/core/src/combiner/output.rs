//! Text serializations of a combined list.
//!
//! Scores are written with the shortest representation that parses back
//! to the same `f64`, so the extended file round-trips exactly.

use std::fmt::Write as _;

use super::combine::{CombinedList, ProviderSet, ScoredDomain};
use crate::domain::parse_domain;
use crate::psl::PublicSuffixRules;
use crate::snapshot::Provider;

pub const EXTENDED_HEADER: &str = "rank,domain,score,providers_seen,days_seen";

/// `rank,domain` lines, each newline-terminated.
pub fn list_csv(list: &CombinedList) -> String {
    let mut out = String::with_capacity(list.len() * 24);
    for e in &list.entries {
        let _ = writeln!(out, "{},{}", e.rank, e.domain.name());
    }
    out
}

/// The header line, then `rank,domain,score,providers_seen,days_seen`
/// rows. Providers are `;`-separated.
pub fn extended_csv(list: &CombinedList) -> String {
    let mut out = String::with_capacity(list.len() * 48 + EXTENDED_HEADER.len() + 1);
    out.push_str(EXTENDED_HEADER);
    out.push('\n');
    for e in &list.entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.rank,
            e.domain.name(),
            e.score,
            e.providers_seen,
            e.days_seen
        );
    }
    out
}

#[derive(Debug, thiserror::Error)]
#[error("extended list line {line}: {message}")]
pub struct ExtendedCsvError {
    pub line: usize,
    pub message: String,
}

/// Parses the output of [`extended_csv`]. Ranks must be dense from 1.
pub fn parse_extended_csv(text: &str, rules: &PublicSuffixRules) -> Result<Vec<ScoredDomain>, ExtendedCsvError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == EXTENDED_HEADER => {}
        _ => {
            return Err(ExtendedCsvError {
                line: 1,
                message: format!("expected header {EXTENDED_HEADER:?}"),
            })
        }
    }
    let mut entries = Vec::new();
    for (i, line) in lines {
        let bad = |message: String| ExtendedCsvError { line: i + 1, message };
        let fields: Vec<&str> = line.split(',').collect();
        let [rank, domain, score, providers, days] = fields[..] else {
            return Err(bad(format!("expected 5 fields, found {}", fields.len())));
        };
        let rank: usize = rank.parse().map_err(|_| bad(format!("bad rank {rank:?}")))?;
        if rank != entries.len() + 1 {
            return Err(bad(format!("rank {rank} is not dense")));
        }
        let providers_seen = if providers.is_empty() {
            ProviderSet::default()
        } else {
            providers
                .split(';')
                .map(|p| p.parse::<Provider>())
                .collect::<Result<ProviderSet, _>>()
                .map_err(|e| bad(e.to_string()))?
        };
        entries.push(ScoredDomain {
            rank,
            domain: parse_domain(domain, rules).map_err(|e| bad(e.to_string()))?,
            score: score.parse().map_err(|_| bad(format!("bad score {score:?}")))?,
            providers_seen,
            days_seen: days.parse().map_err(|_| bad(format!("bad days_seen {days:?}")))?,
        });
    }
    Ok(entries)
}
