//! Synthetic fixtures and brute-force oracles shared by integration tests.

#![allow(dead_code)]

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use toplist::combiner::{combine, CombineConfig, CombinedList, DateWindow};
use toplist::{parse_domain, DomainRecord, Provider, ProviderSnapshot, PublicSuffixRules};

pub mod cases;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn day0() -> NaiveDate {
    NaiveDate::from_ymd_opt(2018, 10, 1).unwrap()
}

pub fn day(offset: u32) -> NaiveDate {
    day0() + chrono::Days::new(u64::from(offset))
}

pub fn domains(names: impl IntoIterator<Item = impl AsRef<str>>) -> Vec<DomainRecord> {
    let rules = PublicSuffixRules::builtin();
    names
        .into_iter()
        .map(|n| parse_domain(n.as_ref(), &rules).unwrap())
        .collect()
}

pub fn snapshot(provider: Provider, date: NaiveDate, names: &[impl AsRef<str>]) -> ProviderSnapshot {
    ProviderSnapshot::from_ordered(provider, date, domains(names)).unwrap()
}

const TLDS: [&str; 6] = ["com", "org", "net", "de", "co.uk", "io"];

pub fn site_name(i: usize) -> String {
    format!("site{i}.{}", TLDS[i % TLDS.len()])
}

/// Daily top-`list_len` lists drawn from a Zipf-popular universe.
///
/// Each provider sees the universe through a fixed per-domain bias, and
/// each day adds independent noise, so lists agree at the top and churn
/// in the tail.
pub struct ZipfFixture {
    pub snapshots: Vec<ProviderSnapshot>,
    pub config: CombineConfig,
}

impl ZipfFixture {
    pub fn new(seed: u64, universe: usize, list_len: usize, providers: &[Provider], days: u32) -> Self {
        let mut rng = rng(seed);
        let names: Vec<String> = (0..universe).map(site_name).collect();
        let bias = LogNormal::new(0.0, 0.5).unwrap();
        let noise = LogNormal::new(0.0, 0.3).unwrap();
        let mut snapshots = Vec::new();
        for &p in providers {
            let provider_bias: Vec<f64> = (0..universe).map(|_| bias.sample(&mut rng)).collect();
            for d in 0..days {
                let mut scored: Vec<(f64, usize)> = (0..universe)
                    .map(|i| (provider_bias[i] * noise.sample(&mut rng) / (i as f64 + 1.0), i))
                    .collect();
                scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                let top: Vec<&str> = scored[..list_len].iter().map(|&(_, i)| names[i].as_str()).collect();
                snapshots.push(snapshot(p, day(d), &top));
            }
        }
        let mut config = CombineConfig::new(
            providers.iter().copied(),
            DateWindow::new(day(0), day(days - 1)).unwrap(),
        );
        config.reference_length = list_len as u64;
        ZipfFixture { snapshots, config }
    }

    pub fn combined(&self) -> CombinedList {
        combine(&self.snapshots, &self.config).unwrap()
    }

    /// Inserts `probe` at `rank` on the given provider's lists for the last
    /// `days` days of the window (dropping each list's last entry, so
    /// lengths stay fixed), then reports the probe's combined rank.
    pub fn probe_rank(&self, probe: &str, rank: usize, manipulated: &[Provider], days: u32) -> Option<usize> {
        let first_day = self.config.window.end - chrono::Days::new(u64::from(days - 1));
        let probe_domain = domains([probe]).pop().unwrap();
        let snaps: Vec<ProviderSnapshot> = self
            .snapshots
            .iter()
            .map(|s| {
                if !manipulated.contains(&s.provider()) || s.date() < first_day {
                    return s.clone();
                }
                let mut list: Vec<DomainRecord> = s.domains().cloned().collect();
                list.insert(rank - 1, probe_domain.clone());
                list.truncate(s.len());
                ProviderSnapshot::from_ordered(s.provider(), s.date(), list).unwrap()
            })
            .collect();
        let out = combine(&snaps, &self.config).unwrap();
        let rank = out.names().position(|n| n == probe).map(|i| i + 1);
        rank
    }
}

pub fn random_choice<T: Copy>(rng: &mut ChaCha8Rng, items: &[T]) -> T {
    items[rng.random_range(0..items.len())]
}
