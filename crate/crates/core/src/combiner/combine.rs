use std::borrow::Cow;
use std::collections::{HashMap, HashSet};
use std::fmt;

use chrono::NaiveDate;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::config::CombineConfig;
use super::scoring::{exact_score, score};
use super::CombineError;
use crate::digest::Digest;
use crate::domain::DomainRecord;
use crate::snapshot::{Provider, ProviderSnapshot};

/// Identity of one input list, as recorded in manifests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputRef {
    pub provider: Provider,
    pub date: NaiveDate,
    pub digest: Digest,
}

impl fmt::Display for InputRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.provider, self.date.format("%Y-%m-%d"), self.digest)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ProviderSet(u8);

impl ProviderSet {
    pub fn insert(&mut self, p: Provider) {
        self.0 |= p.bit();
    }

    pub fn contains(&self, p: Provider) -> bool {
        self.0 & p.bit() != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Provider> + '_ {
        Provider::ALL.into_iter().filter(|p| self.contains(*p))
    }
}

impl FromIterator<Provider> for ProviderSet {
    fn from_iter<I: IntoIterator<Item = Provider>>(iter: I) -> Self {
        let mut set = ProviderSet::default();
        for p in iter {
            set.insert(p);
        }
        set
    }
}

impl fmt::Display for ProviderSet {
    /// `;`-separated provider names, e.g. `alexa;umbrella`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            f.write_str(p.as_str())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDomain {
    pub rank: usize,
    pub domain: DomainRecord,
    pub score: f64,
    pub providers_seen: ProviderSet,
    pub days_seen: u32,
}

/// A scored, ordered ranking with its provenance.
///
/// Entries are sorted by score descending, ties by ascending domain name,
/// and ranked densely from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedList {
    pub config: CombineConfig,
    /// Inputs that contributed, sorted by (provider, date).
    pub inputs: Vec<InputRef>,
    pub entries: Vec<ScoredDomain>,
}

impl CombinedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.iter().map(|e| e.domain.name())
    }

    pub fn domains(&self) -> impl Iterator<Item = &DomainRecord> + '_ {
        self.entries.iter().map(|e| &e.domain)
    }

    /// (provider, day) pairs in the configured scope with no input.
    pub fn missing_inputs(&self) -> Vec<(Provider, NaiveDate)> {
        let present: HashSet<(Provider, NaiveDate)> = self.inputs.iter().map(|i| (i.provider, i.date)).collect();
        self.config
            .providers
            .iter()
            .flat_map(|&p| self.config.window.days().map(move |d| (p, d)))
            .filter(|key| !present.contains(key))
            .collect()
    }

    pub(crate) fn retain(&mut self, mut keep: impl FnMut(&ScoredDomain) -> bool) {
        self.entries.retain(|e| keep(e));
        self.redensify();
    }

    pub(crate) fn redensify(&mut self) {
        for (i, e) in self.entries.iter_mut().enumerate() {
            e.rank = i + 1;
        }
    }
}

struct Tally {
    domain: DomainRecord,
    score: f64,
    providers: ProviderSet,
    days: u32,
    last_day: NaiveDate,
}

/// Streaming score accumulator.
///
/// Inputs must arrive in strictly increasing (date, provider) order, which
/// fixes the floating-point summation order and lets days be counted
/// without per-domain sets. Scores that come out within 1e-9 (relative) of
/// a neighbour are recomputed exactly in a second pass, so mathematically
/// tied domains tie exactly and fall back to name order.
pub struct Combiner<'c> {
    config: &'c CombineConfig,
    tallies: HashMap<String, Tally>,
    inputs: Vec<InputRef>,
    last: Option<(NaiveDate, Provider)>,
}

const NEAR_TIE: f64 = 1e-9;

impl<'c> Combiner<'c> {
    pub fn new(config: &'c CombineConfig) -> Result<Self, CombineError> {
        config.validate()?;
        Ok(Combiner {
            config,
            tallies: HashMap::new(),
            inputs: Vec::new(),
            last: None,
        })
    }

    pub fn add(&mut self, snapshot: &ProviderSnapshot) -> Result<(), CombineError> {
        let (provider, date) = (snapshot.provider(), snapshot.date());
        if !self.config.providers.contains(&provider) || !self.config.window.contains(date) {
            return Err(CombineError::OutOfScope { provider, date });
        }
        if let Some(last) = self.last {
            if (date, provider) == last {
                return Err(CombineError::Conflict { provider, date });
            }
            if (date, provider) < last {
                return Err(CombineError::OutOfOrder { provider, date });
            }
        }
        self.last = Some((date, provider));
        self.inputs.push(InputRef {
            provider,
            date,
            digest: snapshot.digest(),
        });

        let list = effective_list(snapshot, self.config);
        let m = scored_len(&list, self.config);
        for entry in &list.entries()[..m as usize] {
            let s = score(
                self.config.method,
                u64::from(entry.rank),
                m,
                self.config.reference_length,
            );
            let name = entry.domain.name();
            let tally = match self.tallies.get_mut(name) {
                Some(t) => t,
                None => self.tallies.entry(name.to_string()).or_insert(Tally {
                    domain: entry.domain.clone(),
                    score: 0.0,
                    providers: ProviderSet::default(),
                    days: 0,
                    last_day: date,
                }),
            };
            tally.score += s;
            tally.providers.insert(provider);
            if tally.days == 0 || tally.last_day != date {
                tally.days += 1;
                tally.last_day = date;
            }
        }
        Ok(())
    }

    /// Orders the accumulated scores and applies the count filters.
    ///
    /// `replay` is only called when near-ties exist; it must feed the same
    /// snapshots that were passed to [`add`](Self::add), in any order.
    pub fn finish_with<E, F>(self, replay: F) -> Result<CombinedList, E>
    where
        E: From<CombineError>,
        F: FnOnce(&mut dyn FnMut(&ProviderSnapshot)) -> Result<(), E>,
    {
        if self.inputs.is_empty() {
            return Err(CombineError::EmptyInput.into());
        }
        let config = self.config;
        let mut entries: Vec<ScoredDomain> = self
            .tallies
            .into_values()
            .filter(|t| t.providers.len() as u32 >= config.min_providers && t.days >= config.min_days)
            .map(|t| ScoredDomain {
                rank: 0,
                domain: t.domain,
                score: t.score,
                providers_seen: t.providers,
                days_seen: t.days,
            })
            .collect();
        entries.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.domain.name().cmp(b.domain.name()))
        });

        let clusters = near_tie_clusters(&entries);
        if !clusters.is_empty() {
            let members: HashSet<String> = clusters
                .iter()
                .flat_map(|c| entries[c.clone()].iter().map(|e| e.domain.name().to_string()))
                .collect();
            let mut exact: HashMap<String, BigRational> = HashMap::with_capacity(members.len());
            replay(&mut |snapshot: &ProviderSnapshot| {
                let list = effective_list(snapshot, config);
                let m = scored_len(&list, config);
                for entry in &list.entries()[..m as usize] {
                    if members.contains(entry.domain.name()) {
                        let s = exact_score(config.method, u64::from(entry.rank), m, config.reference_length);
                        *exact
                            .entry(entry.domain.name().to_string())
                            .or_insert_with(BigRational::zero) += s;
                    }
                }
            })?;
            for range in clusters {
                let cluster = &mut entries[range];
                let mut keyed: Vec<(BigRational, ScoredDomain)> = cluster
                    .iter()
                    .map(|e| {
                        (
                            exact.get(e.domain.name()).cloned().unwrap_or_else(BigRational::zero),
                            e.clone(),
                        )
                    })
                    .collect();
                keyed.sort_by(|(xa, a), (xb, b)| xb.cmp(xa).then_with(|| a.domain.name().cmp(b.domain.name())));
                for (slot, (x, mut e)) in cluster.iter_mut().zip(keyed) {
                    e.score = x.to_f64().unwrap_or(e.score);
                    *slot = e;
                }
            }
        }

        let mut inputs = self.inputs;
        inputs.sort();
        let mut list = CombinedList {
            config: config.clone(),
            inputs,
            entries,
        };
        list.redensify();
        Ok(list)
    }
}

/// The list as scored: Umbrella is reduced to PLDs when configured.
pub(crate) fn effective_list<'a>(snapshot: &'a ProviderSnapshot, config: &CombineConfig) -> Cow<'a, ProviderSnapshot> {
    if config.umbrella_pld_mode && snapshot.provider() == Provider::Umbrella {
        Cow::Owned(umbrella_to_pld(snapshot))
    } else {
        Cow::Borrowed(snapshot)
    }
}

/// List length M after input truncation.
pub(crate) fn scored_len(list: &ProviderSnapshot, config: &CombineConfig) -> u64 {
    let len = list.len() as u64;
    config.input_truncation.map_or(len, |cut| len.min(cut))
}

fn near_tie_clusters(entries: &[ScoredDomain]) -> Vec<std::ops::Range<usize>> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=entries.len() {
        let tied = i < entries.len() && {
            let (a, b) = (entries[i - 1].score, entries[i].score);
            (a - b).abs() <= NEAR_TIE * a.abs().max(b.abs())
        };
        if !tied {
            if i - start > 1 {
                clusters.push(start..i);
            }
            start = i;
        }
    }
    clusters
}

/// Combines snapshots held in memory.
///
/// Every snapshot must lie within the configured providers and window,
/// with at most one per (provider, date).
pub fn combine(snapshots: &[ProviderSnapshot], config: &CombineConfig) -> Result<CombinedList, CombineError> {
    let mut ordered: Vec<&ProviderSnapshot> = snapshots.iter().collect();
    ordered.sort_by_key(|s| (s.date(), s.provider()));
    let mut combiner = Combiner::new(config)?;
    for s in &ordered {
        combiner.add(s)?;
    }
    combiner.finish_with(|visit| {
        for s in &ordered {
            visit(s);
        }
        Ok(())
    })
}

/// Reduces a list to pay-level domains: each PLD takes the best rank of
/// any of its names, and ranks are re-densified.
pub fn umbrella_to_pld(snapshot: &ProviderSnapshot) -> ProviderSnapshot {
    let mut seen = HashSet::new();
    let plds = snapshot
        .domains()
        .filter(|d| seen.insert(d.pld().to_string()))
        .map(DomainRecord::pld_record)
        .collect::<Vec<_>>();
    ProviderSnapshot::from_ordered(snapshot.provider(), snapshot.date(), plds)
        .expect("PLDs are unique after first-occurrence dedupe")
}
