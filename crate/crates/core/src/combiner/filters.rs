//! The post-scoring filter pipeline. Every filter keeps the relative order
//! of surviving entries and re-densifies ranks.

use std::collections::HashSet;

use super::combine::CombinedList;
use super::config::{CombineConfig, HealthFilter, MissingPolicy, SetRef};
use super::inputs::{CrawlIndex, CrawlResult, FlagSet};
use super::CombineError;

/// Applies, in order: TLD include, TLD exclude, subdomain pattern and
/// cross-TLD PLD deduplication.
///
/// TLDs are compared against the effective TLD (`co.uk`, not `uk`).
/// Deduplication groups names by their PLD minus its TLD and keeps the
/// best-ranked member of each group.
pub fn apply_domain_filters(mut list: CombinedList, config: &CombineConfig) -> CombinedList {
    if !config.tld_include.is_empty() {
        list.retain(|e| config.tld_include.contains(e.domain.tld()));
    }
    if !config.tld_exclude.is_empty() {
        list.retain(|e| !config.tld_exclude.contains(e.domain.tld()));
    }
    if let Some(pattern) = &config.subdomain_pattern {
        list.retain(|e| pattern.matches(&e.domain));
    }
    if config.pld_dedupe_across_tlds {
        let mut seen = HashSet::new();
        list.retain(|e| seen.insert(e.domain.pld_stem().to_string()));
    }
    list
}

fn passes(result: &CrawlResult, filter: &HealthFilter) -> bool {
    (!filter.require_reachable || result.reachable)
        && filter.status.is_none_or(|s| result.status == Some(s))
        && filter
            .min_body_bytes
            .is_none_or(|min| result.body_bytes.is_some_and(|b| b >= min))
}

/// Keeps domains whose crawl result passes every threshold in `filter`.
/// Domains absent from `crawl` follow `filter.missing`.
pub fn apply_health_filters(mut list: CombinedList, crawl: &CrawlIndex, filter: &HealthFilter) -> CombinedList {
    list.retain(|e| match crawl.get(e.domain.name()) {
        Some(result) => passes(result, filter),
        None => filter.missing == MissingPolicy::Keep,
    });
    list
}

/// Removes domains named in `benign_exclude`, then keeps only domains
/// whose name or PLD appears in `popular_intersect`.
pub fn apply_set_filters(
    mut list: CombinedList,
    benign_exclude: Option<&FlagSet>,
    popular_intersect: Option<&FlagSet>,
) -> CombinedList {
    if let Some(flags) = benign_exclude {
        if !flags.is_empty() {
            list.retain(|e| !flags.contains(e.domain.name()));
        }
    }
    if let Some(popular) = popular_intersect {
        list.retain(|e| popular.contains(e.domain.name()) || popular.contains(e.domain.pld()));
    }
    list
}

pub fn apply_output_truncation(mut list: CombinedList, cut: Option<u64>) -> CombinedList {
    if let Some(cut) = cut {
        list.entries.truncate(usize::try_from(cut).unwrap_or(usize::MAX));
    }
    list
}

/// External data referenced by a config's filters.
#[derive(Debug, Clone, Copy, Default)]
pub struct FilterInputs<'a> {
    pub crawl: Option<&'a CrawlIndex>,
    pub benign: Option<&'a FlagSet>,
    pub popular: Option<&'a FlagSet>,
}

fn check_set<'a>(
    wanted: &Option<SetRef>,
    given: Option<&'a FlagSet>,
    what: &'static str,
) -> Result<Option<&'a FlagSet>, CombineError> {
    match (wanted, given) {
        (None, _) => Ok(None),
        (Some(_), None) => Err(CombineError::MissingFilterInput(what)),
        (Some(r), Some(set)) if r.digest != set.source_digest => Err(CombineError::FilterInputMismatch(what)),
        (Some(_), Some(set)) => Ok(Some(set)),
    }
}

/// Runs the full filter pipeline configured in `list.config`; output
/// truncation always comes last.
///
/// Every filter input the config references must be supplied, and its
/// digest must match the one pinned in the config.
pub fn finalize(list: CombinedList, inputs: FilterInputs<'_>) -> Result<CombinedList, CombineError> {
    let config = list.config.clone();
    let benign = check_set(&config.benign_exclude, inputs.benign, "benign-exclude flag set")?;
    let popular = check_set(&config.popular_intersect, inputs.popular, "popular-intersect set")?;
    let health = match &config.health_filter {
        None => None,
        Some(filter) => {
            let crawl = inputs.crawl.ok_or(CombineError::MissingFilterInput("crawl results"))?;
            if filter.crawl_digest.is_some() && filter.crawl_digest != crawl.source_digest() {
                return Err(CombineError::FilterInputMismatch("crawl results"));
            }
            Some((crawl, filter))
        }
    };

    let mut list = apply_domain_filters(list, &config);
    if let Some((crawl, filter)) = health {
        list = apply_health_filters(list, crawl, filter);
    }
    list = apply_set_filters(list, benign, popular);
    Ok(apply_output_truncation(list, config.output_truncation))
}
