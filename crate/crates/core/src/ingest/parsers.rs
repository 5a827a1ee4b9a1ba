use std::collections::HashSet;

use chrono::NaiveDate;

use super::{DropReason, ParseError, ParseReport};
use crate::domain::parse_domain;
use crate::psl::PublicSuffixRules;
use crate::snapshot::{Provider, ProviderSnapshot, RankedEntry};

/// Domain-field text Quantcast uses for ranked sites whose name is hidden.
pub const HIDDEN_PROFILE_MARKER: &str = "Hidden profile";

struct SnapshotBuilder<'r> {
    rules: &'r PublicSuffixRules,
    report: ParseReport,
    entries: Vec<RankedEntry>,
    seen: HashSet<String>,
    last_rank: u64,
}

impl<'r> SnapshotBuilder<'r> {
    fn new(provider: Provider, date: NaiveDate, rules: &'r PublicSuffixRules) -> Self {
        SnapshotBuilder {
            rules,
            report: ParseReport::new(provider, date),
            entries: Vec::new(),
            seen: HashSet::new(),
            last_rank: 0,
        }
    }

    fn line(&mut self, rank_field: &str, domain_field: Option<&str>) {
        let rank = match rank_field.trim().parse::<u64>() {
            Ok(r) if r > 0 => r,
            _ => return self.report.drop_line(DropReason::BadRank),
        };
        if rank != self.last_rank + 1 {
            self.report.rank_gaps += 1;
        }
        self.last_rank = rank;

        let Some(raw) = domain_field else {
            return self.report.drop_line(DropReason::MalformedDomain);
        };
        if raw.trim().eq_ignore_ascii_case(HIDDEN_PROFILE_MARKER) {
            return self.report.drop_line(DropReason::HiddenProfile);
        }
        let domain = match parse_domain(raw, self.rules) {
            Ok(d) => d,
            Err(_) => return self.report.drop_line(DropReason::MalformedDomain),
        };
        if !self.seen.insert(domain.name().to_string()) {
            return self.report.drop_line(DropReason::Duplicate);
        }
        self.entries.push(RankedEntry {
            rank: self.entries.len() as u32 + 1,
            domain,
        });
        self.report.accepted += 1;
    }

    fn finish(self) -> (ProviderSnapshot, ParseReport) {
        let ParseReport { provider, date, .. } = self.report;
        let snapshot =
            ProviderSnapshot::new(provider, date, self.entries).expect("builder assigns dense ranks to unique names");
        (snapshot, self.report)
    }
}

fn lines(bytes: &[u8]) -> impl Iterator<Item = Option<&str>> {
    bytes.split(|&b| b == b'\n').filter_map(|raw| {
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        if raw.iter().all(u8::is_ascii_whitespace) {
            return None;
        }
        Some(std::str::from_utf8(raw).ok())
    })
}

/// Parses the headerless `rank,domain` format published by Alexa and
/// Umbrella (and used for archived and combined lists).
pub fn parse_alexa_umbrella_csv(
    bytes: &[u8],
    provider: Provider,
    date: NaiveDate,
    rules: &PublicSuffixRules,
) -> (ProviderSnapshot, ParseReport) {
    let mut b = SnapshotBuilder::new(provider, date, rules);
    for line in lines(bytes) {
        match line {
            None => b.report.drop_line(DropReason::MalformedDomain),
            Some(line) => match line.split_once(',') {
                Some((rank, domain)) => b.line(rank, Some(domain)),
                None => b.line(line, None),
            },
        }
    }
    b.finish()
}

/// The archive's own storage format, which is the `rank,domain` shape.
pub fn parse_canonical_csv(
    bytes: &[u8],
    provider: Provider,
    date: NaiveDate,
    rules: &PublicSuffixRules,
) -> (ProviderSnapshot, ParseReport) {
    parse_alexa_umbrella_csv(bytes, provider, date, rules)
}

/// Parses the Majestic Million CSV. Only the `GlobalRank` and `Domain`
/// columns are read; their position in the header does not matter.
pub fn parse_majestic_csv(
    bytes: &[u8],
    date: NaiveDate,
    rules: &PublicSuffixRules,
) -> Result<(ProviderSnapshot, ParseReport), ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);
    let headers = reader.byte_headers()?.clone();
    if headers.is_empty() {
        return Err(ParseError::MissingHeader);
    }
    let column = |name: &'static str| {
        headers
            .iter()
            .position(|h| String::from_utf8_lossy(h).trim().eq_ignore_ascii_case(name))
            .ok_or(ParseError::MissingColumn(name))
    };
    let rank_col = column("GlobalRank")?;
    let domain_col = column("Domain")?;

    let mut b = SnapshotBuilder::new(Provider::Majestic, date, rules);
    for record in reader.byte_records() {
        let record = record?;
        let field = |i: usize| record.get(i).map(std::str::from_utf8);
        match (field(rank_col), field(domain_col)) {
            (Some(Ok(rank)), Some(Ok(domain))) => b.line(rank, Some(domain)),
            (Some(Ok(rank)), _) => b.line(rank, None),
            _ => b.report.drop_line(DropReason::BadRank),
        }
    }
    Ok(b.finish())
}

/// Parses Quantcast's whitespace-separated `rank domain` lines. Lines
/// starting with `#` are comments; hidden profiles are dropped and the
/// remaining entries re-ranked densely.
pub fn parse_quantcast(bytes: &[u8], date: NaiveDate, rules: &PublicSuffixRules) -> (ProviderSnapshot, ParseReport) {
    let mut b = SnapshotBuilder::new(Provider::Quantcast, date, rules);
    for line in lines(bytes) {
        let Some(line) = line else {
            b.report.drop_line(DropReason::MalformedDomain);
            continue;
        };
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        match line.split_once(char::is_whitespace) {
            Some((rank, rest)) => b.line(rank, Some(rest.trim())),
            None => b.line(line, None),
        }
    }
    b.finish()
}

/// Dispatches to the parser for `provider`'s published format.
pub fn parse_provider_file(
    bytes: &[u8],
    provider: Provider,
    date: NaiveDate,
    rules: &PublicSuffixRules,
) -> Result<(ProviderSnapshot, ParseReport), ParseError> {
    Ok(match provider {
        Provider::Alexa | Provider::Umbrella => parse_alexa_umbrella_csv(bytes, provider, date, rules),
        Provider::Majestic => parse_majestic_csv(bytes, date, rules)?,
        Provider::Quantcast => parse_quantcast(bytes, date, rules),
    })
}
