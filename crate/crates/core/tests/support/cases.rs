//! Hand-built parser fixtures and filter tables with their expected
//! outcomes. Expectations are written out by hand or derived from the
//! annotations in [`SITES`], never from the library under test.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use toplist::combiner::{
    combine, finalize, CombineConfig, CombinedList, CrawlIndex, CrawlResult, DateWindow, FilterInputs, FlagSet,
    HealthFilter, MissingPolicy, SetRef,
};
use toplist::ingest::{parse_provider_file, DropReason, ParseError, ParseReport};
use toplist::{Provider, ProviderSnapshot, PublicSuffixRules};

use super::{day, snapshot};

pub fn parse_day() -> NaiveDate {
    NaiveDate::from_ymd_opt(2018, 10, 31).unwrap()
}

pub struct ExpectedParse {
    pub names: &'static [&'static str],
    pub accepted: usize,
    pub drops: &'static [(DropReason, usize)],
    pub rank_gaps: usize,
}

pub enum Expected {
    Parsed(ExpectedParse),
    Failed(fn(&ParseError) -> bool),
}

pub struct ParserCase {
    pub name: &'static str,
    pub provider: Provider,
    pub input: &'static str,
    pub expected: Expected,
}

const TOP10: &[&str] = &[
    "google.com",
    "facebook.com",
    "youtube.com",
    "twitter.com",
    "microsoft.com",
    "linkedin.com",
    "instagram.com",
    "wikipedia.org",
    "apple.com",
    "googletagmanager.com",
];

const fn clean(names: &'static [&'static str]) -> Expected {
    Expected::Parsed(ExpectedParse {
        names,
        accepted: names.len(),
        drops: &[],
        rank_gaps: 0,
    })
}

pub fn parser_cases() -> Vec<ParserCase> {
    use DropReason::*;
    vec![
        ParserCase {
            name: "alexa_clean",
            provider: Provider::Alexa,
            input: "1,google.com\n2,youtube.com\n3,facebook.com\n4,baidu.com\n",
            expected: clean(&["google.com", "youtube.com", "facebook.com", "baidu.com"]),
        },
        ParserCase {
            name: "alexa_error_paths",
            provider: Provider::Alexa,
            input: "1,google.com\n2,GOOGLE.com\nx,bad.com\n0,zero.com\n4,bad domain.com\n5,\n\
                    6,wikipedia.org\n8,amazon.co.uk.\n9\n",
            expected: Expected::Parsed(ExpectedParse {
                names: &["google.com", "wikipedia.org", "amazon.co.uk"],
                accepted: 3,
                drops: &[(Duplicate, 1), (BadRank, 2), (MalformedDomain, 3)],
                rank_gaps: 2,
            }),
        },
        ParserCase {
            name: "umbrella_crlf_subdomains",
            provider: Provider::Umbrella,
            input: "1,www.google.com\r\n2,API.Example.co.uk\r\n\r\n3,a..b.com\r\n4,netflix.com\r\n",
            expected: Expected::Parsed(ExpectedParse {
                names: &["www.google.com", "api.example.co.uk", "netflix.com"],
                accepted: 3,
                drops: &[(MalformedDomain, 1)],
                rank_gaps: 0,
            }),
        },
        ParserCase {
            name: "majestic_full_header",
            provider: Provider::Majestic,
            input: "GlobalRank,TldRank,Domain,TLD,RefSubNets,RefIPs,IDN_Domain,IDN_TLD,PrevGlobalRank,PrevTldRank,PrevRefSubNets,PrevRefIPs\n\
                    1,1,google.com,com,458291,2104843,google.com,com,1,1,458155,2104503\n\
                    2,2,facebook.com,com,455443,2138536,facebook.com,com,2,2,455287,2138102\n\
                    3,3,youtube.com,com,408262,1701962,youtube.com,com,3,3,408146,1701652\n\
                    4,4,twitter.com,com,406138,1727484,twitter.com,com,4,4,405991,1727118\n\
                    5,5,microsoft.com,com,196358,614788,microsoft.com,com,5,5,196256,614539\n\
                    6,6,linkedin.com,com,301256,1094376,linkedin.com,com,6,6,301177,1094117\n\
                    7,7,instagram.com,com,305468,1182512,instagram.com,com,7,7,305280,1182067\n\
                    8,1,wikipedia.org,org,289387,1006322,wikipedia.org,org,8,1,289296,1006075\n\
                    9,8,apple.com,com,174466,543260,apple.com,com,9,8,174416,543126\n\
                    10,9,googletagmanager.com,com,308815,1180549,googletagmanager.com,com,10,9,308675,1180148\n",
            expected: clean(TOP10),
        },
        ParserCase {
            name: "majestic_shuffled_extra_columns",
            provider: Provider::Majestic,
            input: "RefIPs,Domain,Note,TLD,GlobalRank\n\
                    2104843,google.com,x,com,1\n\
                    2138536,facebook.com,,com,2\n\
                    1701962,YouTube.com,y,com,3\n\
                    1727484,twitter.com,,com,4\n\
                    614788,microsoft.com,,com,5\n\
                    1094376,linkedin.com,,com,6\n\
                    1182512,instagram.com,,com,7\n\
                    1006322,wikipedia.org,,org,8\n\
                    543260,apple.com,,com,9\n\
                    1180549,googletagmanager.com,,com,10\n",
            expected: clean(TOP10),
        },
        ParserCase {
            name: "majestic_minimal",
            provider: Provider::Majestic,
            input: "GlobalRank,Domain\n1,google.com\n2,facebook.com\n3,youtube.com\n4,twitter.com\n\
                    5,microsoft.com\n6,linkedin.com\n7,instagram.com\n8,wikipedia.org\n9,apple.com\n\
                    10,googletagmanager.com\n",
            expected: clean(TOP10),
        },
        ParserCase {
            name: "majestic_error_paths",
            provider: Provider::Majestic,
            input: "GlobalRank,TldRank,Domain\n1,1,google.com\n2,1,\nabc,1,x.com\n4,2,yahoo.com\n5\n",
            expected: Expected::Parsed(ExpectedParse {
                names: &["google.com", "yahoo.com"],
                accepted: 2,
                drops: &[(MalformedDomain, 2), (BadRank, 1)],
                rank_gaps: 1,
            }),
        },
        ParserCase {
            name: "majestic_missing_domain_column",
            provider: Provider::Majestic,
            input: "GlobalRank,TldRank,TLD\n1,1,com\n",
            expected: Expected::Failed(|e| matches!(e, ParseError::MissingColumn("Domain"))),
        },
        ParserCase {
            name: "majestic_missing_rank_column",
            provider: Provider::Majestic,
            input: "Domain,TLD\ngoogle.com,com\n",
            expected: Expected::Failed(|e| matches!(e, ParseError::MissingColumn("GlobalRank"))),
        },
        ParserCase {
            name: "majestic_empty",
            provider: Provider::Majestic,
            input: "",
            expected: Expected::Failed(|e| matches!(e, ParseError::MissingHeader)),
        },
        ParserCase {
            name: "quantcast_hidden_profiles",
            provider: Provider::Quantcast,
            input: "# Quantcast Top Million U.S. Web Sites\n\
                    # Rankings estimated as of Oct 31, 2018\n\
                    # Copyright 2018 Quantcast Corporation\n\
                    # Subject to terms of use\n\
                    1\tgoogle.com\n2\tyoutube.com\n3\tHidden profile\n4\tfacebook.com\n\
                    5\tamazon.com\n6\tHidden profile\n7\tHidden profile\n8\twikipedia.org\n\
                    9\tyahoo.com\n10\treddit.com\n11\tHIDDEN PROFILE\n12\tebay.com\n\
                    13\ttwitter.com\n14\tHidden profile\n15\tnetflix.com\n16\tinstagram.com\n",
            expected: Expected::Parsed(ExpectedParse {
                names: &[
                    "google.com",
                    "youtube.com",
                    "facebook.com",
                    "amazon.com",
                    "wikipedia.org",
                    "yahoo.com",
                    "reddit.com",
                    "ebay.com",
                    "twitter.com",
                    "netflix.com",
                    "instagram.com",
                ],
                accepted: 11,
                drops: &[(HiddenProfile, 5)],
                rank_gaps: 0,
            }),
        },
        ParserCase {
            name: "quantcast_error_paths",
            provider: Provider::Quantcast,
            input: "# comment\n1 google.com\n2 google.com\ntwo yahoo.com\n4 bad!name.com\n5\n6   msn.com\n",
            expected: Expected::Parsed(ExpectedParse {
                names: &["google.com", "msn.com"],
                accepted: 2,
                drops: &[(Duplicate, 1), (BadRank, 1), (MalformedDomain, 2)],
                rank_gaps: 1,
            }),
        },
        ParserCase {
            name: "quantcast_all_hidden",
            provider: Provider::Quantcast,
            input: "1 Hidden profile\n2 Hidden profile\n",
            expected: Expected::Parsed(ExpectedParse {
                names: &[],
                accepted: 0,
                drops: &[(HiddenProfile, 2)],
                rank_gaps: 0,
            }),
        },
    ]
}

/// Runs one parser case; `Err` describes the first mismatch.
pub fn check_parser_case(case: &ParserCase) -> Result<(), String> {
    let rules = PublicSuffixRules::builtin();
    let outcome = parse_provider_file(case.input.as_bytes(), case.provider, parse_day(), &rules);
    match (&case.expected, outcome) {
        (Expected::Failed(is_expected), Err(e)) if is_expected(&e) => Ok(()),
        (Expected::Failed(_), Err(e)) => Err(format!("{}: unexpected error {e}", case.name)),
        (Expected::Failed(_), Ok(_)) => Err(format!("{}: parsed but should have failed", case.name)),
        (Expected::Parsed(_), Err(e)) => Err(format!("{}: failed with {e}", case.name)),
        (Expected::Parsed(want), Ok((snap, report))) => compare_parse(case, want, &snap, &report),
    }
}

fn compare_parse(
    case: &ParserCase,
    want: &ExpectedParse,
    snap: &ProviderSnapshot,
    report: &ParseReport,
) -> Result<(), String> {
    let names: Vec<&str> = snap.names().collect();
    if names != want.names {
        return Err(format!("{}: names {names:?}, expected {:?}", case.name, want.names));
    }
    let ranks: Vec<u32> = snap.entries().iter().map(|e| e.rank).collect();
    if ranks != (1..=want.names.len() as u32).collect::<Vec<_>>() {
        return Err(format!("{}: ranks not dense: {ranks:?}", case.name));
    }
    if (snap.provider(), snap.date()) != (case.provider, parse_day()) {
        return Err(format!("{}: wrong provider or date", case.name));
    }
    let drops: BTreeMap<DropReason, usize> = want.drops.iter().copied().collect();
    let got: BTreeMap<DropReason, usize> = DropReason::ALL
        .iter()
        .map(|&r| (r, report.dropped_for(r)))
        .filter(|&(_, n)| n > 0)
        .collect();
    if report.accepted != want.accepted || got != drops || report.rank_gaps != want.rank_gaps {
        return Err(format!(
            "{}: report accepted={} drops={got:?} gaps={}, expected accepted={} drops={drops:?} gaps={}",
            case.name, report.accepted, report.rank_gaps, want.accepted, want.rank_gaps
        ));
    }
    Ok(())
}

/// Umbrella names paired with their hand-assigned pay-level domain.
pub const UMBRELLA_PLD_FIXTURE: [(&str, &str); 15] = [
    ("www.google.com", "google.com"),
    ("google.com", "google.com"),
    ("api.facebook.com", "facebook.com"),
    ("mail.google.com", "google.com"),
    ("a.b.example.co.uk", "example.co.uk"),
    ("example.co.uk", "example.co.uk"),
    ("netflix.com", "netflix.com"),
    ("cdn.netflix.com", "netflix.com"),
    ("www.bbc.co.uk", "bbc.co.uk"),
    ("www.amazon.de", "amazon.de"),
    ("static.xx.fbcdn.net", "fbcdn.net"),
    ("fbcdn.net", "fbcdn.net"),
    ("graph.facebook.com", "facebook.com"),
    ("apple.com", "apple.com"),
    ("www.apple.com", "apple.com"),
];

/// Group-by oracle: each PLD once, ordered by the best rank of its names.
pub fn umbrella_pld_oracle() -> Vec<&'static str> {
    let mut best: BTreeMap<&str, usize> = BTreeMap::new();
    for (rank, &(_, pld)) in UMBRELLA_PLD_FIXTURE.iter().enumerate() {
        best.entry(pld).or_insert(rank);
    }
    let mut plds: Vec<(usize, &str)> = best.into_iter().map(|(p, r)| (r, p)).collect();
    plds.sort();
    plds.into_iter().map(|(_, p)| p).collect()
}

/// A domain of the filter fixture with hand-written attributes.
pub struct Site {
    pub name: &'static str,
    pub tld: &'static str,
    pub pld: &'static str,
    /// The PLD without its public suffix.
    pub stem: &'static str,
    /// `(provider index, day)` pairs on which the site is listed.
    pub seen: &'static [(usize, u32)],
    /// `(reachable, status, body bytes)`; `None` when not crawled.
    pub crawl: Option<(bool, Option<u16>, Option<u64>)>,
}

impl Site {
    pub fn is_subdomain(&self) -> bool {
        self.name != self.pld
    }

    pub fn first_label(&self) -> &'static str {
        self.name.split('.').next().unwrap()
    }

    pub fn providers(&self) -> usize {
        self.seen.iter().map(|s| s.0).collect::<BTreeSet<_>>().len()
    }

    pub fn days(&self) -> usize {
        self.seen.iter().map(|s| s.1).collect::<BTreeSet<_>>().len()
    }
}

pub const FILTER_PROVIDERS: [Provider; 3] = [Provider::Alexa, Provider::Majestic, Provider::Quantcast];

const ALL9: &[(usize, u32)] = &[(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)];

pub const SITES: [Site; 12] = [
    Site {
        name: "google.com",
        tld: "com",
        pld: "google.com",
        stem: "google",
        seen: ALL9,
        crawl: Some((true, Some(200), Some(5000))),
    },
    Site {
        name: "www.google.com",
        tld: "com",
        pld: "google.com",
        stem: "google",
        seen: &[(0, 0), (0, 1), (0, 2)],
        crawl: Some((true, Some(200), Some(300))),
    },
    Site {
        name: "google.de",
        tld: "de",
        pld: "google.de",
        stem: "google",
        seen: &[(0, 0), (1, 0)],
        crawl: Some((true, Some(301), Some(1000))),
    },
    Site {
        name: "login.example.com",
        tld: "com",
        pld: "example.com",
        stem: "example",
        seen: &[(1, 0), (1, 1), (1, 2), (2, 1)],
        crawl: Some((true, Some(200), Some(800))),
    },
    Site {
        name: "example.org",
        tld: "org",
        pld: "example.org",
        stem: "example",
        seen: &[(0, 2), (1, 2), (2, 2)],
        crawl: None,
    },
    Site {
        name: "mail.example.org",
        tld: "org",
        pld: "example.org",
        stem: "example",
        seen: &[(2, 0), (2, 1), (2, 2)],
        crawl: Some((false, None, None)),
    },
    Site {
        name: "bbc.co.uk",
        tld: "co.uk",
        pld: "bbc.co.uk",
        stem: "bbc",
        seen: &[(0, 0), (0, 1), (1, 1)],
        crawl: Some((true, Some(200), Some(2048))),
    },
    Site {
        name: "login.bbc.co.uk",
        tld: "co.uk",
        pld: "bbc.co.uk",
        stem: "bbc",
        seen: &[(1, 2)],
        crawl: Some((true, Some(404), Some(100))),
    },
    Site {
        name: "login.io",
        tld: "io",
        pld: "login.io",
        stem: "login",
        seen: &[(0, 1)],
        crawl: Some((true, Some(200), Some(600))),
    },
    Site {
        name: "tracker.net",
        tld: "net",
        pld: "tracker.net",
        stem: "tracker",
        seen: ALL9,
        crawl: Some((true, Some(500), Some(0))),
    },
    Site {
        name: "malware.net",
        tld: "net",
        pld: "malware.net",
        stem: "malware",
        seen: &[(2, 1)],
        crawl: Some((true, Some(200), Some(900))),
    },
    Site {
        name: "shop.de",
        tld: "de",
        pld: "shop.de",
        stem: "shop",
        seen: &[(1, 0), (1, 1)],
        crawl: None,
    },
];

pub fn site(name: &str) -> &'static Site {
    SITES.iter().find(|s| s.name == name).unwrap()
}

/// One list per provider and day, listing the sites seen there in
/// [`SITES`] order.
pub fn filter_snapshots() -> Vec<ProviderSnapshot> {
    let mut out = Vec::new();
    for (p, &provider) in FILTER_PROVIDERS.iter().enumerate() {
        for d in 0..3 {
            let names: Vec<&str> = SITES
                .iter()
                .filter(|s| s.seen.contains(&(p, d)))
                .map(|s| s.name)
                .collect();
            out.push(snapshot(provider, day(d), &names));
        }
    }
    out
}

pub fn filter_base_config() -> CombineConfig {
    let mut c = CombineConfig::new(FILTER_PROVIDERS, DateWindow::new(day(0), day(2)).unwrap());
    c.reference_length = 10;
    c
}

pub struct FilterData {
    pub crawl: CrawlIndex,
    pub benign: FlagSet,
    pub popular: FlagSet,
}

pub fn filter_data() -> FilterData {
    let crawl = CrawlIndex::from_results(SITES.iter().filter_map(|s| {
        s.crawl.map(|(reachable, status, body_bytes)| CrawlResult {
            domain: s.name.to_string(),
            reachable,
            status,
            body_bytes,
        })
    }));
    FilterData {
        crawl,
        benign: FlagSet::from_names("benign", ["malware.net", "www.google.com", "unlisted.com"]),
        popular: FlagSet::from_names("popular", ["google.com", "example.org", "bbc.co.uk"]),
    }
}

fn set_ref(s: &FlagSet) -> SetRef {
    SetRef {
        label: s.label.clone(),
        digest: s.source_digest,
    }
}

pub struct FilterCase {
    pub name: &'static str,
    pub configure: fn(&mut CombineConfig, &FilterData),
    /// Oracle: the expected survivors, given the unfiltered list's sites
    /// in order.
    pub expect: fn(&[&'static Site]) -> Vec<&'static str>,
}

fn keep(sites: &[&'static Site], mut pred: impl FnMut(&Site) -> bool) -> Vec<&'static str> {
    sites.iter().filter(|s| pred(s)).map(|s| s.name).collect()
}

fn passes_health(s: &Site, missing_kept: bool) -> bool {
    match s.crawl {
        None => missing_kept,
        Some((reachable, status, body)) => reachable && status == Some(200) && body.is_some_and(|b| b >= 512),
    }
}

fn tlds(v: &[&str]) -> BTreeSet<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn filter_cases() -> Vec<FilterCase> {
    vec![
        FilterCase {
            name: "tld_include",
            configure: |c, _| c.tld_include = tlds(&["com", "co.uk"]),
            expect: |s| keep(s, |x| x.tld == "com" || x.tld == "co.uk"),
        },
        FilterCase {
            name: "tld_include_matches_effective_tld_only",
            configure: |c, _| c.tld_include = tlds(&["uk"]),
            expect: |s| keep(s, |x| x.tld == "uk"),
        },
        FilterCase {
            name: "tld_exclude",
            configure: |c, _| c.tld_exclude = tlds(&["de", "net"]),
            expect: |s| keep(s, |x| x.tld != "de" && x.tld != "net"),
        },
        FilterCase {
            name: "tld_include_and_exclude",
            configure: |c, _| {
                c.tld_include = tlds(&["com", "de"]);
                c.tld_exclude = tlds(&["net"]);
            },
            expect: |s| keep(s, |x| x.tld == "com" || x.tld == "de"),
        },
        FilterCase {
            name: "pld_dedupe",
            configure: |c, _| c.pld_dedupe_across_tlds = true,
            expect: |s| {
                let mut seen = BTreeSet::new();
                keep(s, |x| seen.insert(x.stem))
            },
        },
        FilterCase {
            name: "subdomain_pattern",
            configure: |c, _| c.subdomain_pattern = Some("login.*".parse().unwrap()),
            expect: |s| keep(s, |x| x.is_subdomain() && x.first_label() == "login"),
        },
        FilterCase {
            name: "subdomain_pattern_glob",
            configure: |c, _| c.subdomain_pattern = Some("*a*.*".parse().unwrap()),
            expect: |s| keep(s, |x| x.is_subdomain() && x.first_label().contains('a')),
        },
        FilterCase {
            name: "min_providers",
            configure: |c, _| c.min_providers = 2,
            expect: |s| keep(s, |x| x.providers() >= 2),
        },
        FilterCase {
            name: "min_days",
            configure: |c, _| c.min_days = 3,
            expect: |s| keep(s, |x| x.days() >= 3),
        },
        FilterCase {
            name: "min_providers_and_days",
            configure: |c, _| {
                c.min_providers = 2;
                c.min_days = 2;
            },
            expect: |s| keep(s, |x| x.providers() >= 2 && x.days() >= 2),
        },
        FilterCase {
            name: "health_keep_uncrawled",
            configure: |c, _| c.health_filter = Some(HealthFilter::default()),
            expect: |s| keep(s, |x| passes_health(x, true)),
        },
        FilterCase {
            name: "health_drop_uncrawled",
            configure: |c, _| {
                c.health_filter = Some(HealthFilter {
                    missing: MissingPolicy::Drop,
                    ..HealthFilter::default()
                })
            },
            expect: |s| keep(s, |x| passes_health(x, false)),
        },
        FilterCase {
            name: "health_reachable_only",
            configure: |c, _| {
                c.health_filter = Some(HealthFilter {
                    require_reachable: true,
                    status: None,
                    min_body_bytes: None,
                    missing: MissingPolicy::Drop,
                    crawl_digest: None,
                })
            },
            expect: |s| keep(s, |x| x.crawl.is_some_and(|c| c.0)),
        },
        FilterCase {
            name: "flag_exclude",
            configure: |c, d| c.benign_exclude = Some(set_ref(&d.benign)),
            expect: |s| {
                keep(s, |x| {
                    !["malware.net", "www.google.com", "unlisted.com"].contains(&x.name)
                })
            },
        },
        FilterCase {
            name: "popular_intersect",
            configure: |c, d| c.popular_intersect = Some(set_ref(&d.popular)),
            expect: |s| {
                let popular = ["google.com", "example.org", "bbc.co.uk"];
                keep(s, |x| popular.contains(&x.name) || popular.contains(&x.pld))
            },
        },
        FilterCase {
            name: "exclude_then_intersect_then_truncate",
            configure: |c, d| {
                c.benign_exclude = Some(set_ref(&d.benign));
                c.popular_intersect = Some(set_ref(&d.popular));
                c.output_truncation = Some(3);
            },
            expect: |s| {
                let popular = ["google.com", "example.org", "bbc.co.uk"];
                let mut v = keep(s, |x| {
                    x.name != "www.google.com" && (popular.contains(&x.name) || popular.contains(&x.pld))
                });
                v.truncate(3);
                v
            },
        },
    ]
}

/// The unfiltered combined list of the fixture.
pub fn unfiltered() -> CombinedList {
    combine(&filter_snapshots(), &filter_base_config()).unwrap()
}

/// Runs one filter case; returns `(actual, expected)` survivor names.
pub fn run_filter_case(case: &FilterCase) -> (Vec<String>, Vec<String>) {
    let data = filter_data();
    let base: Vec<&'static Site> = unfiltered().names().map(site).collect();
    let expected = (case.expect)(&base).into_iter().map(str::to_string).collect();

    let mut config = filter_base_config();
    (case.configure)(&mut config, &data);
    let list = combine(&filter_snapshots(), &config).unwrap();
    let inputs = FilterInputs {
        crawl: Some(&data.crawl),
        benign: Some(&data.benign),
        popular: Some(&data.popular),
    };
    let list = finalize(list, inputs).unwrap();
    let ranks: Vec<usize> = list.entries.iter().map(|e| e.rank).collect();
    assert_eq!(
        ranks,
        (1..=list.len()).collect::<Vec<_>>(),
        "{}: ranks not dense",
        case.name
    );
    (list.names().map(str::to_string).collect(), expected)
}
