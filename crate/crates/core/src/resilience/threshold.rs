use std::fmt;

use super::ResilienceError;
use crate::combiner::{score, CombinedList};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdQuery {
    /// Combined rank to reach, 1-based.
    pub target_rank: usize,
    pub days_manipulated: u32,
    pub providers_manipulated: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// The worst per-day single-list rank that still reaches the target.
    Rank(u64),
    /// Even rank 1 on every manipulated list falls short.
    Unreachable,
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Rank(r) => write!(f, "{r}"),
            Threshold::Unreachable => f.write_str("unreachable"),
        }
    }
}

/// Largest rank `r` such that a new domain listed at `r` on
/// `providers_manipulated` full-length lists for `days_manipulated` days
/// scores at least the domain currently at `target_rank`.
///
/// Incumbent scores are taken as fixed, and a score equal to the
/// incumbent's counts as reaching the target (the probe is assumed to
/// win the name tie-break).
pub fn entry_threshold(list: &CombinedList, query: ThresholdQuery) -> Result<Threshold, ResilienceError> {
    let config = &list.config;
    if list.is_empty() {
        return Err(ResilienceError::EmptyList);
    }
    let ThresholdQuery {
        target_rank,
        days_manipulated,
        providers_manipulated,
    } = query;
    let invalid = |m: String| Err(ResilienceError::InvalidQuery(m));
    if target_rank == 0 || target_rank > list.len() {
        return invalid(format!("target rank {target_rank} outside 1..={}", list.len()));
    }
    if days_manipulated == 0 || days_manipulated as usize > config.window.len() {
        return invalid(format!(
            "days manipulated {days_manipulated} outside 1..={}",
            config.window.len()
        ));
    }
    if providers_manipulated == 0 || providers_manipulated as usize > config.providers.len() {
        return invalid(format!(
            "providers manipulated {providers_manipulated} outside 1..={}",
            config.providers.len()
        ));
    }

    let target = list.entries[target_rank - 1].score;
    let n = config.reference_length;
    let copies = f64::from(days_manipulated) * f64::from(providers_manipulated);
    let reaches = |r: u64| copies * score(config.method, r, n, n) >= target;
    if !reaches(1) {
        return Ok(Threshold::Unreachable);
    }
    // reaches(lo) holds; find the last r in lo..=hi for which it does
    let (mut lo, mut hi) = (1u64, n);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if reaches(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(Threshold::Rank(lo))
}
