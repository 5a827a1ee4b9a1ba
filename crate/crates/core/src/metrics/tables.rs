use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use chrono::NaiveDate;

use super::MetricsError;
use crate::combiner::{CrawlIndex, FlagSet};
use crate::domain::DomainRecord;

/// Root pages smaller than this count as thin.
pub const THIN_PAGE_BYTES: u64 = 512;

/// Fraction of `a`'s names that also appear in `b`.
pub fn daily_intersection<'a, 'b>(
    a: impl IntoIterator<Item = &'a str>,
    b: impl IntoIterator<Item = &'b str>,
) -> Result<f64, MetricsError> {
    let b: HashSet<&str> = b.into_iter().collect();
    let (mut total, mut shared) = (0usize, 0usize);
    for name in a {
        total += 1;
        shared += usize::from(b.contains(name));
    }
    if total == 0 {
        return Err(MetricsError::EmptyInput);
    }
    Ok(shared as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub label: String,
    /// `(day, fraction of the previous day's names still present)`.
    pub series: Vec<(NaiveDate, f64)>,
}

impl StabilityReport {
    pub fn mean(&self) -> Option<f64> {
        (!self.series.is_empty()).then(|| self.series.iter().map(|(_, f)| f).sum::<f64>() / self.series.len() as f64)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,date,intersection\n");
        for (day, f) in &self.series {
            let _ = writeln!(out, "{},{},{}", self.label, day.format("%Y-%m-%d"), f);
        }
        out
    }
}

/// Day-over-day intersection for every pair of consecutive calendar days
/// present in `days`. Pairs separated by a missing day are skipped.
pub fn stability_series<N: AsRef<str>>(
    label: impl Into<String>,
    mut days: Vec<(NaiveDate, Vec<N>)>,
) -> Result<StabilityReport, MetricsError> {
    days.sort_by_key(|(d, _)| *d);
    let mut series = Vec::new();
    for pair in days.windows(2) {
        let ((d0, prev), (d1, next)) = (&pair[0], &pair[1]);
        if d0.succ_opt() != Some(*d1) {
            continue;
        }
        let f = daily_intersection(prev.iter().map(AsRef::as_ref), next.iter().map(AsRef::as_ref))?;
        series.push((*d1, f));
    }
    Ok(StabilityReport {
        label: label.into(),
        series,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TldRow {
    pub tld: String,
    pub count: usize,
    pub cumulative: f64,
}

/// TLD counts by descending count (ties by TLD name) with the running
/// fraction of all names; the final row's fraction is exactly 1.0.
pub fn tld_distribution<'a>(domains: impl IntoIterator<Item = &'a DomainRecord>) -> Vec<TldRow> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut total = 0usize;
    for d in domains {
        *counts.entry(d.tld()).or_default() += 1;
        total += 1;
    }
    let mut rows: Vec<(&str, usize)> = counts.into_iter().collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut running = 0usize;
    rows.into_iter()
        .map(|(tld, count)| {
            running += count;
            TldRow {
                tld: tld.to_string(),
                count,
                cumulative: running as f64 / total as f64,
            }
        })
        .collect()
}

pub fn tld_csv(rows: &[TldRow]) -> String {
    let mut out = String::from("tld,count,cumulative_fraction\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.tld, r.count, r.cumulative);
    }
    out
}

/// Crawl outcome tallies. Status classes count reachable names only;
/// `thin` counts reachable names whose body is under [`THIN_PAGE_BYTES`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HealthSummary {
    pub total: usize,
    pub uncrawled: usize,
    pub unreachable: usize,
    pub status_2xx: usize,
    pub status_3xx: usize,
    pub status_4xx: usize,
    pub status_5xx: usize,
    /// Reachable with no status or a status outside 200..=599.
    pub status_other: usize,
    pub thin: usize,
}

impl HealthSummary {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("category,count\n");
        for (k, v) in [
            ("total", self.total),
            ("uncrawled", self.uncrawled),
            ("unreachable", self.unreachable),
            ("2xx", self.status_2xx),
            ("3xx", self.status_3xx),
            ("4xx", self.status_4xx),
            ("5xx", self.status_5xx),
            ("other", self.status_other),
            ("thin", self.thin),
        ] {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }
}

pub fn health_summary<'a>(names: impl IntoIterator<Item = &'a str>, crawl: &CrawlIndex) -> HealthSummary {
    let mut s = HealthSummary::default();
    for name in names {
        s.total += 1;
        let Some(r) = crawl.get(name) else {
            s.uncrawled += 1;
            continue;
        };
        if !r.reachable {
            s.unreachable += 1;
            continue;
        }
        match r.status {
            Some(200..=299) => s.status_2xx += 1,
            Some(300..=399) => s.status_3xx += 1,
            Some(400..=499) => s.status_4xx += 1,
            Some(500..=599) => s.status_5xx += 1,
            _ => s.status_other += 1,
        }
        if r.body_bytes.is_some_and(|b| b < THIN_PAGE_BYTES) {
            s.thin += 1;
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagRow {
    pub label: String,
    /// Requested cut, before clamping to the list length.
    pub cut: usize,
    pub count: usize,
}

/// For every flag set and every cut `K`, how many of the top `K` names are
/// in the set. Cuts beyond the list length cover the whole list.
pub fn flag_summary<S: AsRef<str>>(names: &[S], flag_sets: &[FlagSet], cuts: &[usize]) -> Vec<FlagRow> {
    let mut rows = Vec::with_capacity(flag_sets.len() * cuts.len());
    for set in flag_sets {
        // prefix[i] = flagged names among the first i
        let mut prefix = Vec::with_capacity(names.len() + 1);
        prefix.push(0usize);
        for n in names {
            prefix.push(prefix.last().unwrap() + usize::from(set.contains(n.as_ref())));
        }
        for &cut in cuts {
            rows.push(FlagRow {
                label: set.label.clone(),
                cut,
                count: prefix[cut.min(names.len())],
            });
        }
    }
    rows
}

pub fn flag_csv(rows: &[FlagRow]) -> String {
    let mut out = String::from("label,cut,count\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.label, r.cut, r.count);
    }
    out
}
