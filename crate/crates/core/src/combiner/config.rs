use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{Duration, NaiveDate};

use crate::digest::Digest;
use crate::domain::DomainRecord;
use crate::snapshot::Provider;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Borda,
    Dowdall,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Borda => "borda",
            Method::Dowdall => "dowdall",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "borda" => Ok(Method::Borda),
            "dowdall" => Ok(Method::Dowdall),
            other => Err(ConfigError(format!(
                "unknown method {other:?} (expected borda or dowdall)"
            ))),
        }
    }
}

/// Inclusive range of calendar days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self, ConfigError> {
        if start > end {
            return Err(ConfigError(format!("empty window {start}..{end}")));
        }
        Ok(DateWindow { start, end })
    }

    pub fn single(day: NaiveDate) -> Self {
        DateWindow { start: day, end: day }
    }

    /// The `days` days ending on (and including) `end`.
    pub fn ending(end: NaiveDate, days: u32) -> Self {
        let days = days.max(1);
        DateWindow {
            start: end - Duration::days(i64::from(days) - 1),
            end,
        }
    }

    pub fn len(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, day: NaiveDate) -> bool {
        self.start <= day && day <= self.end
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        let start = self.start;
        (0..self.len() as i64).map(move |i| start + Duration::days(i))
    }
}

impl fmt::Display for DateWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start.format("%Y-%m-%d"), self.end.format("%Y-%m-%d"))
    }
}

impl FromStr for DateWindow {
    type Err = ConfigError;

    /// Accepts `YYYY-MM-DD..YYYY-MM-DD` or a single `YYYY-MM-DD`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let day = |t: &str| {
            NaiveDate::parse_from_str(t.trim(), "%Y-%m-%d")
                .map_err(|_| ConfigError(format!("bad date {t:?} (expected YYYY-MM-DD)")))
        };
        match s.split_once("..") {
            Some((a, b)) => DateWindow::new(day(a)?, day(b)?),
            None => Ok(DateWindow::single(day(s)?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MissingPolicy {
    Keep,
    Drop,
}

impl FromStr for MissingPolicy {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "keep" => Ok(MissingPolicy::Keep),
            "drop" => Ok(MissingPolicy::Drop),
            other => Err(ConfigError(format!(
                "unknown missing policy {other:?} (expected keep or drop)"
            ))),
        }
    }
}

impl fmt::Display for MissingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MissingPolicy::Keep => "keep",
            MissingPolicy::Drop => "drop",
        })
    }
}

/// Thresholds over crawl results. A domain passes when every set
/// threshold holds; domains absent from the crawl follow `missing`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HealthFilter {
    pub require_reachable: bool,
    pub status: Option<u16>,
    pub min_body_bytes: Option<u64>,
    pub missing: MissingPolicy,
    pub crawl_digest: Option<Digest>,
}

impl Default for HealthFilter {
    /// Reachable, HTTP 200, and a root page of at least 512 bytes.
    fn default() -> Self {
        HealthFilter {
            require_reachable: true,
            status: Some(200),
            min_body_bytes: Some(512),
            missing: MissingPolicy::Keep,
            crawl_digest: None,
        }
    }
}

impl HealthFilter {
    fn canonical(&self) -> String {
        format!(
            "reachable={};status={};min_body_bytes={};missing={};crawl={}",
            self.require_reachable,
            opt(self.status),
            opt(self.min_body_bytes),
            self.missing,
            opt(self.crawl_digest),
        )
    }

    fn parse_canonical(s: &str) -> Result<Self, ConfigError> {
        let mut f = HealthFilter {
            require_reachable: false,
            status: None,
            min_body_bytes: None,
            missing: MissingPolicy::Keep,
            crawl_digest: None,
        };
        for part in s.split(';') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("bad health filter part {part:?}")))?;
            match k {
                "reachable" => f.require_reachable = parse_value(k, v)?,
                "status" => f.status = parse_opt(k, v)?,
                "min_body_bytes" => f.min_body_bytes = parse_opt(k, v)?,
                "missing" => f.missing = v.parse()?,
                "crawl" => f.crawl_digest = parse_opt(k, v)?,
                _ => return Err(ConfigError(format!("unknown health filter key {k:?}"))),
            }
        }
        Ok(f)
    }
}

/// Selector on the first label of subdomains, written `label.*`.
/// The label part may use `*` as a glob, e.g. `auth*.*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubdomainPattern(String);

impl SubdomainPattern {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn label(&self) -> &str {
        self.0.strip_suffix(".*").unwrap_or(&self.0)
    }

    /// Matches subdomains (names strictly below their PLD) whose first
    /// label matches the pattern.
    pub fn matches(&self, domain: &DomainRecord) -> bool {
        domain.is_subdomain() && glob_match(self.label(), domain.first_label())
    }
}

impl FromStr for SubdomainPattern {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        match s.strip_suffix(".*") {
            Some(label) if !label.is_empty() && !label.contains('.') => Ok(SubdomainPattern(s)),
            _ => Err(ConfigError(format!(
                "bad subdomain pattern {s:?} (expected e.g. login.*)"
            ))),
        }
    }
}

impl fmt::Display for SubdomainPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn glob_match(pattern: &str, text: &str) -> bool {
    let parts: Vec<&str> = pattern.split('*').collect();
    if parts.len() == 1 {
        return pattern == text;
    }
    let (first, last) = (parts[0], parts[parts.len() - 1]);
    if !text.starts_with(first) || text.len() < first.len() + last.len() || !text.ends_with(last) {
        return false;
    }
    let mut rest = &text[first.len()..text.len() - last.len()];
    for middle in &parts[1..parts.len() - 1] {
        match rest.find(middle) {
            Some(i) => rest = &rest[i + middle.len()..],
            None => return false,
        }
    }
    true
}

/// Reference to an external domain set (flag list or popularity set),
/// pinned by the digest of its file.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetRef {
    pub label: String,
    pub digest: Digest,
}

impl fmt::Display for SetRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.label, self.digest)
    }
}

impl FromStr for SetRef {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (label, digest) = s
            .rsplit_once('@')
            .ok_or_else(|| ConfigError(format!("bad set reference {s:?}")))?;
        Ok(SetRef {
            label: label.to_string(),
            digest: parse_value("set digest", digest)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid combine config: {0}")]
pub struct ConfigError(pub String);

/// The full recipe for a combined list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombineConfig {
    pub providers: BTreeSet<Provider>,
    pub window: DateWindow,
    pub method: Method,
    pub reference_length: u64,
    /// Top-X cut applied to every provider list before scoring.
    pub input_truncation: Option<u64>,
    pub umbrella_pld_mode: bool,
    pub min_providers: u32,
    pub min_days: u32,
    pub tld_include: BTreeSet<String>,
    pub tld_exclude: BTreeSet<String>,
    pub pld_dedupe_across_tlds: bool,
    pub subdomain_pattern: Option<SubdomainPattern>,
    pub health_filter: Option<HealthFilter>,
    pub benign_exclude: Option<SetRef>,
    pub popular_intersect: Option<SetRef>,
    pub output_truncation: Option<u64>,
    pub public_suffix_digest: Option<Digest>,
}

pub const STANDARD_WINDOW_DAYS: u32 = 30;
pub const STANDARD_REFERENCE_LENGTH: u64 = 1_000_000;

impl CombineConfig {
    /// Dowdall over `providers` for `window`, no filters.
    pub fn new(providers: impl IntoIterator<Item = Provider>, window: DateWindow) -> Self {
        CombineConfig {
            providers: providers.into_iter().collect(),
            window,
            method: Method::Dowdall,
            reference_length: STANDARD_REFERENCE_LENGTH,
            input_truncation: None,
            umbrella_pld_mode: false,
            min_providers: 1,
            min_days: 1,
            tld_include: BTreeSet::new(),
            tld_exclude: BTreeSet::new(),
            pld_dedupe_across_tlds: false,
            subdomain_pattern: None,
            health_filter: None,
            benign_exclude: None,
            popular_intersect: None,
            output_truncation: None,
            public_suffix_digest: None,
        }
    }

    /// The standard list: Dowdall over all four providers for the 30 days
    /// ending on `end`, truncated to one million entries.
    pub fn standard(end: NaiveDate) -> Self {
        CombineConfig {
            output_truncation: Some(STANDARD_REFERENCE_LENGTH),
            ..Self::new(Provider::ALL, DateWindow::ending(end, STANDARD_WINDOW_DAYS))
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: &str| Err(ConfigError(m.to_string()));
        if self.providers.is_empty() {
            return fail("no providers selected");
        }
        if self.window.start > self.window.end {
            return fail("empty date window");
        }
        if self.reference_length == 0 {
            return fail("reference length must be positive");
        }
        if self.input_truncation == Some(0) || self.output_truncation == Some(0) {
            return fail("truncations must be positive");
        }
        if self.min_providers == 0 || self.min_days == 0 {
            return fail("min_providers and min_days must be at least 1");
        }
        if let Some(tld) = self.tld_include.intersection(&self.tld_exclude).next() {
            return Err(ConfigError(format!("TLD {tld:?} is both included and excluded")));
        }
        for label in [&self.benign_exclude, &self.popular_intersect].into_iter().flatten() {
            if label.label.contains(['\n', '@']) {
                return fail("set labels may not contain newlines or '@'");
            }
        }
        Ok(())
    }

    /// Canonical `key: value` lines in fixed order, each newline-terminated.
    pub fn canonical(&self) -> String {
        let join = |set: &BTreeSet<String>| {
            if set.is_empty() {
                "none".to_string()
            } else {
                set.iter().cloned().collect::<Vec<_>>().join(",")
            }
        };
        let providers: Vec<&str> = self.providers.iter().map(|p| p.as_str()).collect();
        let fields: [(&str, String); 17] = [
            ("providers", providers.join(",")),
            ("window", self.window.to_string()),
            ("method", self.method.to_string()),
            ("reference_length", self.reference_length.to_string()),
            ("input_truncation", opt(self.input_truncation)),
            ("umbrella_pld_mode", self.umbrella_pld_mode.to_string()),
            ("min_providers", self.min_providers.to_string()),
            ("min_days", self.min_days.to_string()),
            ("tld_include", join(&self.tld_include)),
            ("tld_exclude", join(&self.tld_exclude)),
            ("pld_dedupe_across_tlds", self.pld_dedupe_across_tlds.to_string()),
            ("subdomain_pattern", opt(self.subdomain_pattern.as_ref())),
            (
                "health_filter",
                self.health_filter
                    .as_ref()
                    .map_or("none".into(), HealthFilter::canonical),
            ),
            ("benign_exclude", opt(self.benign_exclude.as_ref())),
            ("popular_intersect", opt(self.popular_intersect.as_ref())),
            ("output_truncation", opt(self.output_truncation)),
            ("public_suffix_digest", opt(self.public_suffix_digest)),
        ];
        fields.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }

    /// Inverse of [`canonical`](Self::canonical). Keys must appear exactly
    /// once each, in canonical order.
    pub fn from_canonical(text: &str) -> Result<Self, ConfigError> {
        let mut lines = text.lines();
        let mut next = |key: &str| -> Result<String, ConfigError> {
            let line = lines
                .next()
                .ok_or_else(|| ConfigError(format!("missing key {key:?}")))?;
            match line.split_once(": ") {
                Some((k, v)) if k == key => Ok(v.to_string()),
                _ => Err(ConfigError(format!("expected key {key:?}, found {line:?}"))),
            }
        };
        let set = |v: String| -> BTreeSet<String> {
            if v == "none" {
                BTreeSet::new()
            } else {
                v.split(',').map(str::to_string).collect()
            }
        };

        let providers = next("providers")?
            .split(',')
            .map(|p| p.parse::<Provider>().map_err(|e| ConfigError(e.to_string())))
            .collect::<Result<BTreeSet<_>, _>>()?;
        let config = CombineConfig {
            providers,
            window: next("window")?.parse()?,
            method: next("method")?.parse()?,
            reference_length: parse_value("reference_length", &next("reference_length")?)?,
            input_truncation: parse_opt("input_truncation", &next("input_truncation")?)?,
            umbrella_pld_mode: parse_value("umbrella_pld_mode", &next("umbrella_pld_mode")?)?,
            min_providers: parse_value("min_providers", &next("min_providers")?)?,
            min_days: parse_value("min_days", &next("min_days")?)?,
            tld_include: set(next("tld_include")?),
            tld_exclude: set(next("tld_exclude")?),
            pld_dedupe_across_tlds: parse_value("pld_dedupe_across_tlds", &next("pld_dedupe_across_tlds")?)?,
            subdomain_pattern: parse_opt("subdomain_pattern", &next("subdomain_pattern")?)?,
            health_filter: match next("health_filter")?.as_str() {
                "none" => None,
                v => Some(HealthFilter::parse_canonical(v)?),
            },
            benign_exclude: parse_opt("benign_exclude", &next("benign_exclude")?)?,
            popular_intersect: parse_opt("popular_intersect", &next("popular_intersect")?)?,
            output_truncation: parse_opt("output_truncation", &next("output_truncation")?)?,
            public_suffix_digest: parse_opt("public_suffix_digest", &next("public_suffix_digest")?)?,
        };
        if let Some(extra) = lines.next() {
            return Err(ConfigError(format!("unexpected trailing line {extra:?}")));
        }
        config.validate()?;
        Ok(config)
    }
}

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "none".to_string(), |v| v.to_string())
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError(format!("bad value {v:?} for {key}")))
}

fn parse_opt<T: FromStr>(key: &str, v: &str) -> Result<Option<T>, ConfigError> {
    if v == "none" {
        Ok(None)
    } else {
        parse_value(key, v).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::parse_domain;
    use crate::psl::PublicSuffixRules;
    use proptest::prelude::*;

    fn day(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2018, 10, d).unwrap()
    }

    #[test]
    fn standard_config_matches_published_defaults() {
        let c = CombineConfig::standard(day(31));
        assert_eq!(c.providers.len(), 4);
        assert_eq!(c.window.len(), 30);
        assert_eq!(c.window.start, day(2));
        assert_eq!(c.method, Method::Dowdall);
        assert_eq!(c.reference_length, 1_000_000);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let base = CombineConfig::new([Provider::Alexa], DateWindow::single(day(1)));
        let mut c = base.clone();
        c.providers.clear();
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.input_truncation = Some(0);
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.tld_include.insert("com".into());
        c.tld_exclude.insert("com".into());
        assert!(c.validate().is_err());
        assert!("2018-10-05..2018-10-01".parse::<DateWindow>().is_err());
    }

    #[test]
    fn subdomain_pattern_matching() {
        let rules = PublicSuffixRules::builtin();
        let p: SubdomainPattern = "login.*".parse().unwrap();
        let d = |n| parse_domain(n, &rules).unwrap();
        assert!(p.matches(&d("login.example.com")));
        assert!(p.matches(&d("login.example.co.uk")));
        assert!(!p.matches(&d("www.example.com")));
        assert!(!p.matches(&d("login.com")));
        let g: SubdomainPattern = "auth*.*".parse().unwrap();
        assert!(g.matches(&d("auth2.example.com")));
        assert!(!g.matches(&d("oauth.example.com")));
        assert!("login".parse::<SubdomainPattern>().is_err());
        assert!("a.b.*".parse::<SubdomainPattern>().is_err());
    }

    #[test]
    fn glob_cases() {
        assert!(glob_match("a*c", "abc"));
        assert!(glob_match("a*c", "ac"));
        assert!(!glob_match("a*c", "a"));
        assert!(glob_match("*", "anything"));
        assert!(glob_match("*in*", "login"));
    }

    #[test]
    fn canonical_form_is_stable() {
        let c = CombineConfig::new(
            [Provider::Majestic, Provider::Alexa],
            "2018-03-01..2018-03-30".parse().unwrap(),
        );
        let text = c.canonical();
        assert!(text.starts_with("providers: alexa,majestic\nwindow: 2018-03-01..2018-03-30\nmethod: dowdall\n"));
        assert!(text.ends_with("public_suffix_digest: none\n"));
        assert_eq!(text.lines().count(), 17);
    }

    fn arb_config() -> impl Strategy<Value = CombineConfig> {
        (
            proptest::sample::subsequence(Provider::ALL.to_vec(), 1..=4),
            1u32..60,
            any::<bool>(),
            proptest::option::of(1u64..1000),
            (1u32..4, 1u32..30, any::<bool>(), any::<bool>()),
            proptest::collection::btree_set("[a-z]{2,3}", 0..3),
            proptest::option::of(prop::sample::select(vec!["login.*", "auth*.*"])),
            proptest::option::of((
                any::<bool>(),
                proptest::option::of(100u16..600),
                proptest::option::of(0u64..4096),
            )),
            proptest::option::of(1u64..1_000_000),
        )
            .prop_map(
                |(providers, days, borda, cut, (minp, mind, pld, dedupe), tlds, pattern, health, top)| {
                    let mut c = CombineConfig::new(
                        providers,
                        DateWindow::ending(NaiveDate::from_ymd_opt(2018, 10, 31).unwrap(), days),
                    );
                    c.method = if borda { Method::Borda } else { Method::Dowdall };
                    c.input_truncation = cut;
                    c.min_providers = minp;
                    c.min_days = mind;
                    c.umbrella_pld_mode = pld;
                    c.pld_dedupe_across_tlds = dedupe;
                    c.tld_include = tlds;
                    c.subdomain_pattern = pattern.map(|p| p.parse().unwrap());
                    c.health_filter = health.map(|(r, s, b)| HealthFilter {
                        require_reachable: r,
                        status: s,
                        min_body_bytes: b,
                        missing: MissingPolicy::Drop,
                        crawl_digest: Some(Digest::of(b"crawl")),
                    });
                    c.benign_exclude = Some(SetRef {
                        label: "safe-browsing".into(),
                        digest: Digest::of(b"sb"),
                    });
                    c.output_truncation = top;
                    c.public_suffix_digest = Some(Digest::of(b"psl"));
                    c
                },
            )
    }

    proptest! {
        #[test]
        fn canonical_round_trips(c in arb_config()) {
            let text = c.canonical();
            prop_assert_eq!(CombineConfig::from_canonical(&text).unwrap(), c);
        }
    }
}
