//! Threshold search that accounts for the probe displacing incumbents.
//!
//! Inserting a new domain at rank `r` of a list pushes every entry at `r`
//! or below down by one, and the last entry drops off so the list keeps
//! its length. Those incumbents lose score, which the closed form in
//! [`entry_threshold`](super::entry_threshold) ignores. Here the losses
//! are computed from the input snapshots, so the result brackets exactly:
//! rank `r*` reaches the target and `r* + 1` does not.

use std::collections::{HashMap, HashSet};

use chrono::NaiveDate;
use num_rational::BigRational;
use num_traits::Zero;

use super::{ResilienceError, Threshold};
use crate::combiner::{effective_list, exact_score, score, scored_len, CombinedList, InputRef};
use crate::snapshot::{Provider, ProviderSnapshot};

/// Where a probe domain is inserted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manipulation {
    /// The manipulated provider-day lists; each must be an input of the
    /// combined list.
    pub lists: Vec<(Provider, NaiveDate)>,
    /// A name absent from every input.
    pub probe: String,
}

impl Manipulation {
    /// The last `days` days of the window on the first `providers`
    /// configured providers (in name order) that have inputs on those days.
    pub fn latest(list: &CombinedList, days: u32, providers: u32, probe: impl Into<String>) -> Self {
        let window = &list.config.window;
        let first = window.end - chrono::Days::new(u64::from(days.saturating_sub(1)));
        let present: HashSet<(Provider, NaiveDate)> = list.inputs.iter().map(|i| (i.provider, i.date)).collect();
        let chosen: Vec<Provider> = list
            .config
            .providers
            .iter()
            .copied()
            .filter(|p| window.days().any(|d| d >= first && present.contains(&(*p, d))))
            .take(providers as usize)
            .collect();
        let lists = chosen
            .iter()
            .flat_map(|&p| window.days().filter(move |d| *d >= first).map(move |d| (p, d)))
            .filter(|key| present.contains(key))
            .collect();
        Manipulation {
            lists,
            probe: probe.into(),
        }
    }
}

struct ManipulatedList {
    len: u64,
    /// (rank, competitor index), ascending by rank.
    competitors: Vec<(u64, usize)>,
}

/// Exact per-rank evaluation of a probe against a combined list.
pub struct ProbeModel<'a> {
    list: &'a CombinedList,
    snapshots: Vec<&'a ProviderSnapshot>,
    manipulated: Vec<ManipulatedList>,
    manipulated_keys: HashSet<(Provider, NaiveDate)>,
    probe: String,
}

impl<'a> ProbeModel<'a> {
    pub fn new(
        list: &'a CombinedList,
        snapshots: &'a [ProviderSnapshot],
        manipulation: &Manipulation,
    ) -> Result<Self, ResilienceError> {
        let invalid = |m: String| Err(ResilienceError::InvalidQuery(m));
        if list.is_empty() {
            return Err(ResilienceError::EmptyList);
        }
        if manipulation.lists.is_empty() {
            return invalid("no manipulated lists".into());
        }
        let by_key: HashMap<(Provider, NaiveDate), &ProviderSnapshot> =
            snapshots.iter().map(|s| ((s.provider(), s.date()), s)).collect();
        let mut inputs: Vec<InputRef> = by_key
            .values()
            .map(|s| InputRef {
                provider: s.provider(),
                date: s.date(),
                digest: s.digest(),
            })
            .collect();
        inputs.sort();
        if inputs != list.inputs {
            return invalid("snapshots are not the combined list's inputs".into());
        }

        let index: HashMap<&str, usize> = list.names().enumerate().map(|(i, n)| (n, i)).collect();
        let config = &list.config;
        let mut manipulated = Vec::new();
        let mut manipulated_keys = HashSet::new();
        for key in &manipulation.lists {
            let Some(snapshot) = by_key.get(key) else {
                return invalid(format!("{} {} is not an input", key.0, key.1));
            };
            if !manipulated_keys.insert(*key) {
                return invalid(format!("{} {} listed twice", key.0, key.1));
            }
            let effective = effective_list(snapshot, config);
            let len = scored_len(&effective, config);
            if len == 0 {
                return invalid(format!("{} {} is empty", key.0, key.1));
            }
            let competitors = effective.entries()[..len as usize]
                .iter()
                .filter_map(|e| index.get(e.domain.name()).map(|&i| (u64::from(e.rank), i)))
                .collect();
            manipulated.push(ManipulatedList { len, competitors });
        }
        if snapshots.iter().any(|s| s.names().any(|n| n == manipulation.probe)) {
            return invalid(format!("probe {} already appears in the inputs", manipulation.probe));
        }
        Ok(ProbeModel {
            list,
            snapshots: by_key.into_values().collect(),
            manipulated,
            manipulated_keys,
            probe: manipulation.probe.clone(),
        })
    }

    /// The shortest manipulated list's length, the worst insertable rank.
    pub fn max_rank(&self) -> u64 {
        self.manipulated.iter().map(|m| m.len).min().unwrap_or(0)
    }

    fn providers_and_days(&self) -> (usize, usize) {
        let providers: HashSet<Provider> = self.manipulated_keys.iter().map(|k| k.0).collect();
        let days: HashSet<NaiveDate> = self.manipulated_keys.iter().map(|k| k.1).collect();
        (providers.len(), days.len())
    }

    fn score_at(&self, rank: u64, len: u64) -> f64 {
        let c = &self.list.config;
        score(c.method, rank, len, c.reference_length)
    }

    /// Incumbent `i`'s exact score after inserting the probe at `rank`.
    fn exact_after(&self, name: &str, rank: u64) -> BigRational {
        let c = &self.list.config;
        let mut total = BigRational::zero();
        for s in &self.snapshots {
            let effective = effective_list(s, c);
            let len = scored_len(&effective, c);
            let shifted = self.manipulated_keys.contains(&(s.provider(), s.date()));
            if let Some(e) = effective.entries()[..len as usize]
                .iter()
                .find(|e| e.domain.name() == name)
            {
                let mut q = u64::from(e.rank);
                if shifted && q >= rank {
                    q += 1;
                }
                if q <= len {
                    total += exact_score(c.method, q, len, c.reference_length);
                }
            }
        }
        total
    }

    /// The probe's combined rank when inserted at `rank` on every
    /// manipulated list, or `None` if the count filters would drop it.
    pub fn rank_at(&self, rank: u64) -> Option<usize> {
        let c = &self.list.config;
        let (providers, days) = self.providers_and_days();
        if (providers as u32) < c.min_providers || (days as u32) < c.min_days {
            return None;
        }
        let mut loss = vec![0.0f64; self.list.len()];
        let mut probe_score = 0.0;
        for m in &self.manipulated {
            probe_score += self.score_at(rank, m.len);
            let start = m.competitors.partition_point(|&(q, _)| q < rank);
            for &(q, i) in &m.competitors[start..] {
                let next = if q < m.len { self.score_at(q + 1, m.len) } else { 0.0 };
                loss[i] += self.score_at(q, m.len) - next;
            }
        }

        let mut exact_probe: Option<BigRational> = None;
        let mut ahead = 0usize;
        for (i, e) in self.list.entries.iter().enumerate() {
            let after = e.score - loss[i];
            let near = (after - probe_score).abs() <= 1e-9 * after.abs().max(probe_score.abs());
            let beats = if near {
                let probe = exact_probe.get_or_insert_with(|| {
                    self.manipulated
                        .iter()
                        .map(|m| exact_score(c.method, rank, m.len, c.reference_length))
                        .sum()
                });
                let theirs = self.exact_after(e.domain.name(), rank);
                theirs > *probe || (theirs == *probe && e.domain.name() < self.probe.as_str())
            } else {
                after > probe_score
            };
            ahead += usize::from(beats);
        }
        Some(ahead + 1)
    }
}

/// Largest rank at which inserting the probe on every manipulated list
/// places it at or above `target_rank` in the recombined list.
pub fn entry_threshold_exact(
    list: &CombinedList,
    snapshots: &[ProviderSnapshot],
    target_rank: usize,
    manipulation: &Manipulation,
) -> Result<Threshold, ResilienceError> {
    if target_rank == 0 || target_rank > list.len() {
        return Err(ResilienceError::InvalidQuery(format!(
            "target rank {target_rank} outside 1..={}",
            list.len()
        )));
    }
    let model = ProbeModel::new(list, snapshots, manipulation)?;
    let reaches = |r: u64| model.rank_at(r).is_some_and(|p| p <= target_rank);
    if !reaches(1) {
        return Ok(Threshold::Unreachable);
    }
    // the probe's rank is non-decreasing in r
    let (mut lo, mut hi) = (1u64, model.max_rank());
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
